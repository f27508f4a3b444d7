"""Config-driven experiment and sweep runners.

An experiment config is a JSON-compatible mapping; :func:`expand_config`
fills defaults and replaces preset names by fully explicit specs, and the
expanded form is written next to the results so every run can be repeated
without the original file.  Writers are deterministic: re-running the same
expanded config reproduces the output bytes.
"""

from __future__ import annotations

import copy
import csv
import dataclasses
import json
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any

import numpy as np

from . import estimators, fileio, lagmoments, presets, recovery
from .dynamics import NoiseModel, NonlinearityTriple, Trajectory, simulate
from .errors import ConfigError, NumericalError
from .estimators import DEFAULT_COND_LIMIT, EstimateReport
from .graphs import (CombinationMatrix, DirectedGraph,
                     build_combination_matrix, generate_binomial_graph,
                     subgraph)
from .lagmoments import WeightingConfig
from .recovery import AssumptionReport, RecoveryMetrics

#: Trajectories longer than this are only written to disk on request.
TRAJECTORY_PERSIST_LIMIT = 100_000

_DEFAULTS: dict[str, Any] = {
    "graph": {"n_nodes": 50, "p": 0.2, "seed": 101},
    "rho": 0.5,
    "triple": "example1",
    "noise_std": 1.0,
    "sim": {"n_steps": 200_000, "seed": 202, "y0": 0.0},
    "weighting": {"mode": "exact", "delta": 0.0, "singular_tol": 0.0},
    "estimators": ["egg", "granger", "correlation", "precision"],
    "observed_set": None,
    "cond_limit": DEFAULT_COND_LIMIT,
    "norm": "infinity",
    "save_trajectory": None,
}

_PARTIAL_KINDS = {"egg_partial", "granger_partial"}


def experiment_preset(name: str) -> dict:
    """Default experiment config for a named triple preset."""
    if name not in presets.TRIPLE_PRESETS:
        raise ConfigError(
            f"unknown preset {name!r}; expected one of {presets.TRIPLE_PRESETS}"
        )
    config = copy.deepcopy(_DEFAULTS)
    config["triple"] = name
    return config


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ConfigError(message)


def expand_config(raw: dict) -> dict:
    """Validate a config and return its fully explicit form.

    Unknown keys are rejected; preset names in ``triple`` are replaced by
    explicit per-family specs.  The function is idempotent, so the expanded
    form written next to results re-expands to itself.
    """
    _require(isinstance(raw, dict), f"config must be a mapping, got {type(raw).__name__}")
    base = experiment_preset(raw.get("preset", _DEFAULTS["triple"])) \
        if "preset" in raw else copy.deepcopy(_DEFAULTS)
    known = set(_DEFAULTS) | {"preset"}
    unknown = set(raw) - known
    _require(not unknown, f"unknown config keys: {sorted(unknown)}")
    for key, value in raw.items():
        if key == "preset":
            continue
        if isinstance(base.get(key), dict) and isinstance(value, dict):
            sub_unknown = set(value) - set(base[key])
            _require(not sub_unknown,
                     f"unknown keys under {key!r}: {sorted(sub_unknown)}")
            base[key].update(value)
        else:
            base[key] = copy.deepcopy(value)

    graph = base["graph"]
    _require(isinstance(graph["n_nodes"], int) and graph["n_nodes"] >= 1,
             "graph.n_nodes: must be a positive integer")
    _require(0.0 <= graph["p"] <= 1.0, "graph.p: must lie in [0, 1]")
    _require(isinstance(graph["seed"], int), "graph.seed: must be an integer")
    _require(0.0 < base["rho"] < 1.0, "rho: must lie in (0, 1)")
    _require(base["noise_std"] > 0, "noise_std: must be > 0")
    sim = base["sim"]
    _require(isinstance(sim["n_steps"], int) and sim["n_steps"] >= 1,
             "sim.n_steps: must be a positive integer")
    _require(isinstance(sim["seed"], int), "sim.seed: must be an integer")
    weighting = base["weighting"]
    try:
        WeightingConfig(**weighting)
    except ValueError as exc:
        raise ConfigError(f"weighting: {exc}") from exc
    _require(isinstance(base["estimators"], list) and base["estimators"],
             "estimators: must be a non-empty list")
    for kind in base["estimators"]:
        _require(kind in estimators.ESTIMATOR_KINDS,
                 f"estimators: unknown kind {kind!r}")
    observed = base["observed_set"]
    if observed is not None:
        _require(isinstance(observed, list) and observed,
                 "observed_set: must be a non-empty list or null")
        _require(len(set(observed)) == len(observed),
                 "observed_set: nodes must be distinct")
        _require(all(isinstance(v, int) and 0 <= v < graph["n_nodes"]
                     for v in observed),
                 "observed_set: nodes must be integers in range")
        base["observed_set"] = sorted(observed)
    if _PARTIAL_KINDS & set(base["estimators"]):
        _require(observed is not None,
                 "estimators: partial estimation requires observed_set")
    _require(base["cond_limit"] > 0, "cond_limit: must be > 0")
    _require(base["norm"] in ("infinity", "two"),
             "norm: must be 'infinity' or 'two'")

    n_nodes = graph["n_nodes"]
    try:
        triple = presets.triple_from_spec(base["triple"], n_nodes)
    except ValueError as exc:
        raise ConfigError(f"triple: {exc}") from exc
    base["triple"] = presets.triple_to_spec(triple)
    return base


@dataclasses.dataclass
class ExperimentResult:
    """Everything produced by one experiment run."""

    run_dir: Path
    config: dict
    graph: DirectedGraph
    matrix: CombinationMatrix
    trajectory: Trajectory
    reports: dict[str, EstimateReport]
    metrics: dict[str, RecoveryMetrics]
    assumptions: AssumptionReport
    errors: dict[str, str]

    @property
    def failed(self) -> bool:
        return bool(self.errors)


def _run_single_estimator(kind: str, traj: Trajectory,
                          triple: NonlinearityTriple,
                          weighting: WeightingConfig, observed,
                          cond_limit: float) -> EstimateReport:
    if kind == "egg":
        return estimators.egg_from_trajectory(traj, triple, weighting,
                                              cond_limit=cond_limit)
    if kind == "granger":
        return estimators.granger_estimate(traj, cond_limit=cond_limit)
    if kind == "correlation":
        return estimators.correlation_estimate(traj)
    if kind == "precision":
        return estimators.precision_estimate(traj, cond_limit=cond_limit)
    if kind == "least_squares":
        return estimators.least_squares_estimate(traj, triple, weighting)
    if kind in _PARTIAL_KINDS:
        return estimators.partial_estimate(
            traj, observed, kind.removesuffix("_partial"),
            triple=triple, config=weighting, cond_limit=cond_limit,
        )
    raise ConfigError(f"unknown estimator kind {kind!r}")


def run_experiment(config: dict, out_dir: "str | Path") -> ExperimentResult:
    """Run one full generate/simulate/estimate/score pipeline.

    All artifacts are written into ``out_dir``: the graph and true matrix,
    the trajectory (when short enough or explicitly requested), per-
    estimator matrices with JSON metadata, recovery metrics and sorted
    entry profiles, the assumption report and the expanded config.
    Estimator-level numerical failures are recorded and do not stop the
    remaining estimators.
    """
    config = expand_config(config)
    run_dir = Path(out_dir)
    run_dir.mkdir(parents=True, exist_ok=True)

    n_nodes = config["graph"]["n_nodes"]
    graph = generate_binomial_graph(n_nodes, config["graph"]["p"],
                                    config["graph"]["seed"])
    matrix = build_combination_matrix(graph, config["rho"])
    triple = presets.triple_from_spec(config["triple"], n_nodes)
    weighting = WeightingConfig(**config["weighting"])
    noise = NoiseModel.uniform(n_nodes, config["noise_std"])

    (run_dir / "config.expanded.json").write_text(
        json.dumps(config, indent=2, sort_keys=True) + "\n"
    )
    fileio.save_graph(graph, run_dir / "graph.csv")
    fileio.save_matrix(matrix.entries, run_dir / "matrix.csv")

    traj = simulate(matrix, triple, noise, config["sim"]["y0"],
                    config["sim"]["n_steps"], config["sim"]["seed"])
    persist = config["save_trajectory"]
    if persist or (persist is None and traj.n_steps <= TRAJECTORY_PERSIST_LIMIT):
        fileio.save_trajectory(traj, run_dir / "trajectory.csv")

    lag = lagmoments.from_trajectory(traj, triple, weighting)
    fileio.save_lag_matrices(lag, run_dir / "lag_f0.csv", run_dir / "lag_f1.csv")
    f0_hat, _ = lagmoments.finalize(lag)

    observed = config["observed_set"]
    reports: dict[str, EstimateReport] = {}
    metrics: dict[str, RecoveryMetrics] = {}
    errors: dict[str, str] = {}
    for kind in config["estimators"]:
        try:
            report = _run_single_estimator(kind, traj, triple, weighting,
                                           observed, config["cond_limit"])
        except NumericalError as exc:
            errors[kind] = str(exc)
            (run_dir / f"estimate_{kind}.json").write_text(
                json.dumps({"estimator_kind": kind, "error": str(exc)},
                           indent=2, sort_keys=True) + "\n"
            )
            continue
        reports[kind] = report
        fileio.save_estimate_report(report, run_dir / f"estimate_{kind}.json",
                                    run_dir / f"estimate_{kind}.csv")
        if report.observed_set is not None:
            truth_graph = subgraph(graph, report.observed_set)
            truth_entries = matrix.entries[np.ix_(report.observed_set,
                                                  report.observed_set)]
        else:
            truth_graph = graph
            truth_entries = matrix.entries
        try:
            recovered = recovery.classify_edges(report.A_hat)
            metric = recovery.score(recovered, truth_graph, report.A_hat,
                                    truth_entries)
        except NumericalError as exc:
            errors[kind] = str(exc)
            continue
        metrics[kind] = metric
        fileio.save_recovery_metrics(metric, run_dir / f"metrics_{kind}.json")
        fileio.save_profile(
            recovery.sorted_entry_profile(truth_entries, report.A_hat),
            run_dir / f"profile_{kind}.csv",
        )

    empirical = recovery.assumption_report(traj, triple, weighting, f0_hat)
    try:
        static = recovery.stability_constant(triple, matrix, config["norm"])
        assumptions = static.merged_with(empirical)
    except ConfigError:
        assumptions = empirical
    fileio.save_assumption_report(assumptions, run_dir / "assumptions.json")

    return ExperimentResult(
        run_dir=run_dir, config=config, graph=graph, matrix=matrix,
        trajectory=traj, reports=reports, metrics=metrics,
        assumptions=assumptions, errors=errors,
    )


SWEEP_AXES = ("n_steps", "delta", "observed_set_size")


def _point_seed(master_seed: int, index: int) -> int:
    """Deterministic 64-bit seed for sweep point ``index``."""
    seq = np.random.SeedSequence(entropy=master_seed, spawn_key=(index,))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def _point_config(base: dict, axis: str, value, master_seed: int,
                  index: int) -> dict:
    config = copy.deepcopy(base)
    seed = _point_seed(master_seed, index)
    config["sim"]["seed"] = seed
    if axis == "n_steps":
        _require(isinstance(value, int) and value >= 1,
                 f"sweep values for n_steps must be positive integers, got {value!r}")
        config["sim"]["n_steps"] = value
    elif axis == "delta":
        _require(value >= 0, f"sweep values for delta must be >= 0, got {value!r}")
        if value == 0:
            config["weighting"] = {"mode": "exact", "delta": 0.0,
                                   "singular_tol": config["weighting"].get("singular_tol", 0.0)}
        else:
            config["weighting"] = {"mode": "regularized", "delta": float(value),
                                   "singular_tol": 0.0}
    elif axis == "observed_set_size":
        n_nodes = config["graph"]["n_nodes"]
        _require(isinstance(value, int) and 1 <= value <= n_nodes,
                 f"observed_set_size values must lie in [1, {n_nodes}], got {value!r}")
        chooser = np.random.default_rng(seed)
        config["observed_set"] = sorted(
            int(v) for v in chooser.choice(n_nodes, size=value, replace=False)
        )
        if not _PARTIAL_KINDS & set(config["estimators"]):
            config["estimators"] = ["egg_partial"]
    else:
        raise ConfigError(f"unknown sweep axis {axis!r}; expected one of {SWEEP_AXES}")
    return config


def _run_sweep_point(args: tuple) -> dict:
    index, value, config, point_dir, summary_kind = args
    row = {"index": index, "value": value, "estimator": summary_kind,
           "edge_error_rate": "", "matrix_rel_error": "",
           "identifiability_gap": "", "error": ""}
    try:
        result = run_experiment(config, point_dir)
        if summary_kind in result.metrics:
            metric = result.metrics[summary_kind]
            row["edge_error_rate"] = repr(metric.edge_error_rate)
            row["matrix_rel_error"] = repr(metric.matrix_rel_error)
            row["identifiability_gap"] = repr(metric.identifiability_gap)
        if summary_kind in result.errors:
            row["error"] = result.errors[summary_kind]
        elif result.errors:
            row["error"] = "; ".join(
                f"{k}: {v}" for k, v in sorted(result.errors.items())
            )
    except (ConfigError, NumericalError, OSError) as exc:
        row["error"] = str(exc)
    return row


def run_sweep(config: dict, out_dir: "str | Path", workers: int = 1) -> Path:
    """Run an experiment per axis value and summarise into one CSV.

    ``config`` holds a ``base`` experiment config, the ``axis`` name
    (``n_steps``, ``delta`` or ``observed_set_size``), the list of
    ``values`` and a ``master_seed`` from which each point derives an
    independent simulation seed.  A failing point is recorded in its
    summary row and does not stop the sweep.  Points run concurrently when
    ``workers > 1``.  Returns the summary CSV path.
    """
    _require(isinstance(config, dict), "sweep config must be a mapping")
    unknown = set(config) - {"base", "axis", "values", "master_seed",
                             "summary_estimator"}
    _require(not unknown, f"unknown sweep config keys: {sorted(unknown)}")
    for key in ("base", "axis", "values"):
        _require(key in config, f"sweep config missing {key!r}")
    axis = config["axis"]
    _require(axis in SWEEP_AXES,
             f"unknown sweep axis {axis!r}; expected one of {SWEEP_AXES}")
    values = config["values"]
    _require(isinstance(values, list) and values,
             "sweep values must be a non-empty list")
    master_seed = config.get("master_seed", 0)
    _require(isinstance(master_seed, int) and master_seed >= 0,
             "master_seed must be a non-negative integer")
    base = expand_config(config["base"])
    summary_kind = config.get("summary_estimator")

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    jobs = []
    for index, value in enumerate(values):
        point = _point_config(base, axis, value, master_seed, index)
        if summary_kind is None:
            kind = point["estimators"][0]
        else:
            _require(summary_kind in estimators.ESTIMATOR_KINDS,
                     f"summary_estimator: unknown kind {summary_kind!r}")
            kind = summary_kind
        jobs.append((index, value, point, str(out_dir / f"point_{index:03d}"), kind))

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_sweep_point, jobs))
    else:
        rows = [_run_sweep_point(job) for job in jobs]

    summary_path = out_dir / "summary.csv"
    fields = ["index", "value", "estimator", "edge_error_rate",
              "matrix_rel_error", "identifiability_gap", "error"]
    with open(summary_path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        writer.writerows(rows)
    return summary_path
