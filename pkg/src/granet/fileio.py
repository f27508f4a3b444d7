"""On-disk formats: CSV for arrays and graphs, JSON for reports.

All numeric CSV output uses 17 significant digits so values round-trip
exactly through text.  Graph files list ``i,j`` pairs under a ``# N=<n>``
header; trajectory files carry ``# N=<n>, steps=<k>, seed=<s>``; lag-moment
files prepend ``# count=<c>`` to the dense matrix payload.  Writers emit
deterministic bytes for identical inputs.
"""

from __future__ import annotations

import dataclasses
import json
import math
import re
from pathlib import Path

import numpy as np

from .dynamics import Trajectory
from .errors import ConfigError
from .estimators import EstimateReport
from .graphs import DirectedGraph
from .lagmoments import LagMatrices
from .recovery import AssumptionReport, RecoveryMetrics, SortedProfile

_FMT = "%.17g"


def save_graph(graph: DirectedGraph, path: "str | Path") -> None:
    lines = [f"# N={graph.n_nodes}"]
    lines += [f"{i},{j}" for i, j in graph.sorted_edges()]
    Path(path).write_text("\n".join(lines) + "\n")


def load_graph(path: "str | Path") -> DirectedGraph:
    text = Path(path).read_text().strip().splitlines()
    if not text or not text[0].startswith("#"):
        raise ConfigError(f"{path}: missing '# N=<n>' header")
    match = re.match(r"#\s*N\s*=\s*(\d+)", text[0])
    if not match:
        raise ConfigError(f"{path}: malformed header {text[0]!r}")
    n = int(match.group(1))
    edges = set()
    for line in text[1:]:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            i, j = (int(part) for part in line.split(","))
        except ValueError as exc:
            raise ConfigError(f"{path}: malformed edge line {line!r}") from exc
        edges.add((i, j))
    return DirectedGraph(n_nodes=n, edges=frozenset(edges))


def save_matrix(matrix: np.ndarray, path: "str | Path") -> None:
    np.savetxt(path, np.atleast_2d(matrix), fmt=_FMT, delimiter=",")


def load_matrix(path: "str | Path") -> np.ndarray:
    return np.loadtxt(path, delimiter=",", ndmin=2)


def save_trajectory(traj: Trajectory, path: "str | Path") -> None:
    header = f"N={traj.n_nodes}, steps={traj.n_steps}, seed={traj.seed}"
    np.savetxt(path, traj.states, fmt=_FMT, delimiter=",", header=header)


def load_trajectory(path: "str | Path", triple_id: str = "custom") -> Trajectory:
    with open(path) as fh:
        first = fh.readline()
    match = re.match(
        r"#\s*N\s*=\s*(\d+),\s*steps\s*=\s*(\d+),\s*seed\s*=\s*(-?\d+)", first
    )
    if not match:
        raise ConfigError(f"{path}: malformed trajectory header {first!r}")
    n, steps, seed = (int(g) for g in match.groups())
    states = np.loadtxt(path, delimiter=",", ndmin=2)
    if states.shape != (steps + 1, n):
        raise ConfigError(
            f"{path}: payload shape {states.shape} does not match header "
            f"(N={n}, steps={steps})"
        )
    return Trajectory(n_nodes=n, n_steps=steps, states=states, seed=seed,
                      triple_id=triple_id)


def save_lag_matrices(lag: LagMatrices, f0_path: "str | Path",
                      f1_path: "str | Path") -> None:
    for path, payload in ((f0_path, lag.f0_sum), (f1_path, lag.f1_sum)):
        np.savetxt(path, payload, fmt=_FMT, delimiter=",",
                   header=f"count={lag.count}")


def load_lag_matrices(f0_path: "str | Path",
                      f1_path: "str | Path") -> LagMatrices:
    counts = []
    for path in (f0_path, f1_path):
        with open(path) as fh:
            first = fh.readline()
        match = re.match(r"#\s*count\s*=\s*(\d+)", first)
        if not match:
            raise ConfigError(f"{path}: missing '# count=<c>' header")
        counts.append(int(match.group(1)))
    if counts[0] != counts[1]:
        raise ConfigError(
            f"lag files disagree on count: {counts[0]} vs {counts[1]}"
        )
    f0 = np.loadtxt(f0_path, delimiter=",", ndmin=2)
    f1 = np.loadtxt(f1_path, delimiter=",", ndmin=2)
    return LagMatrices(n_nodes=f0.shape[0], count=counts[0],
                       f0_sum=f0, f1_sum=f1)


def _jsonable(value):
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value).replace("'", "")  # "inf", "-inf", "nan"
    if isinstance(value, np.floating):
        return _jsonable(float(value))
    if isinstance(value, np.integer):
        return int(value)
    return value


def _write_json(payload: dict, path: "str | Path") -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def save_estimate_report(report: EstimateReport, json_path: "str | Path",
                         matrix_path: "str | Path") -> None:
    """Write the estimate matrix as CSV and its metadata as JSON."""
    save_matrix(report.A_hat, matrix_path)
    payload = {
        "estimator_kind": report.estimator_kind,
        "n_samples": report.n_samples,
        "cond_F0": _jsonable(report.cond_F0),
        "observed_set": list(report.observed_set)
        if report.observed_set is not None else None,
        "matrix_file": Path(matrix_path).name,
    }
    _write_json(payload, json_path)


def save_recovery_metrics(metrics: RecoveryMetrics, path: "str | Path") -> None:
    payload = {k: _jsonable(v) for k, v in dataclasses.asdict(metrics).items()}
    _write_json(payload, path)


def load_recovery_metrics(path: "str | Path") -> RecoveryMetrics:
    payload = json.loads(Path(path).read_text())
    for key in ("edge_error_rate", "matrix_rel_error", "identifiability_gap"):
        if isinstance(payload.get(key), str):
            payload[key] = float(payload[key])
    return RecoveryMetrics(**payload)


def save_assumption_report(report: AssumptionReport, path: "str | Path") -> None:
    payload = {k: _jsonable(v) for k, v in dataclasses.asdict(report).items()}
    payload["kappa_stable"] = report.kappa_stable
    _write_json(payload, path)


def save_profile(profile: SortedProfile, path: "str | Path") -> None:
    lines = ["slot,true,estimate"]
    lines += [
        f"{slot},{true:.17g},{est:.17g}" for slot, true, est in profile.rows()
    ]
    Path(path).write_text("\n".join(lines) + "\n")


def load_profile(path: "str | Path") -> SortedProfile:
    raw = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return SortedProfile(
        slot_ids=raw[:, 0].astype(int),
        true_values=raw[:, 1],
        estimated_values=raw[:, 2],
    )
