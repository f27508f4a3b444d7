"""Combination-matrix estimators.

The primary estimator solves the generalized regression identity
``A_hat @ F0 = F1`` built from the weighted lag moments; the raw-moment
Granger, correlation and precision estimators serve as linear baselines.
All inversions go through linear solves (never explicit inverses) and are
guarded by a condition-number limit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import lagmoments
from .dynamics import NonlinearityTriple, Trajectory
from .errors import NearSingularError, SingularMatrixError
from .lagmoments import WeightingConfig

#: Estimators abort when the matrix to invert is worse-conditioned than this.
DEFAULT_COND_LIMIT = 1e12

ESTIMATOR_KINDS = (
    "egg", "granger", "correlation", "precision",
    "egg_partial", "granger_partial", "least_squares",
)


@dataclass(frozen=True)
class EstimateReport:
    """One estimator's output.

    ``cond_F0`` is the condition number of the matrix that was inverted
    (None for estimators that invert nothing).  ``observed_set`` lists the
    original node indices when the estimate covers a subnetwork.
    """

    A_hat: np.ndarray
    estimator_kind: str
    n_samples: int
    cond_F0: float | None = None
    observed_set: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.estimator_kind not in ESTIMATOR_KINDS:
            raise ValueError(
                f"unknown estimator kind {self.estimator_kind!r}; "
                f"expected one of {ESTIMATOR_KINDS}"
            )
        a = np.asarray(self.A_hat, dtype=float).copy()
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"A_hat must be square, got shape {a.shape}")
        a.setflags(write=False)
        object.__setattr__(self, "A_hat", a)
        if self.observed_set is not None:
            object.__setattr__(
                self, "observed_set", tuple(int(v) for v in self.observed_set)
            )


def _solve_right(numerator: np.ndarray, denominator: np.ndarray,
                 cond_limit: float, what: str) -> tuple[np.ndarray, float]:
    """Solve ``X @ denominator = numerator`` with a conditioning guard."""
    cond = float(np.linalg.cond(denominator))
    if not np.isfinite(cond):
        raise SingularMatrixError(f"{what} is exactly singular")
    if cond > cond_limit:
        raise NearSingularError(f"{what} is too ill-conditioned to invert", cond)
    try:
        solution = np.linalg.solve(denominator.T, numerator.T).T
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError(f"{what} is singular") from exc
    return solution, cond


def egg_estimate(f0_hat: np.ndarray, f1_hat: np.ndarray,
                 cond_limit: float = DEFAULT_COND_LIMIT,
                 n_samples: int = 0) -> EstimateReport:
    """Estimate the combination matrix from finalized lag moments.

    Solves ``A_hat @ F0 = F1``.  ``f0_hat`` must be symmetric up to
    rounding; a condition number beyond ``cond_limit`` aborts with a
    near-singular error carrying the measured value.
    """
    f0 = np.asarray(f0_hat, dtype=float)
    f1 = np.asarray(f1_hat, dtype=float)
    if f0.shape != f1.shape or f0.ndim != 2 or f0.shape[0] != f0.shape[1]:
        raise ValueError(
            f"lag moments must be square and matching, got {f0.shape} and {f1.shape}"
        )
    skew = np.linalg.norm(f0 - f0.T)
    if skew > 1e-8 * max(1.0, np.linalg.norm(f0)):
        raise ValueError("f0_hat is not symmetric (asymmetry beyond rounding)")
    a_hat, cond = _solve_right(f1, f0, cond_limit, "zero-lag moment matrix")
    return EstimateReport(
        A_hat=a_hat, estimator_kind="egg", n_samples=n_samples, cond_F0=cond,
    )


def egg_from_trajectory(traj: Trajectory, triple: NonlinearityTriple,
                        config: WeightingConfig | None = None,
                        cond_limit: float = DEFAULT_COND_LIMIT) -> EstimateReport:
    """Accumulate lag moments over a trajectory and run :func:`egg_estimate`."""
    config = config or WeightingConfig()
    lag = lagmoments.from_trajectory(traj, triple, config)
    f0_hat, f1_hat = lagmoments.finalize(lag)
    return egg_estimate(f0_hat, f1_hat, cond_limit=cond_limit,
                        n_samples=lag.count)


def _raw_moments(traj: Trajectory) -> tuple[np.ndarray, np.ndarray, int]:
    n = traj.n_steps
    base = traj.states[:n]
    lead = traj.states[1:n + 1]
    r0 = lagmoments.cross_moment_sums(base, base) / n
    r1 = lagmoments.cross_moment_sums(lead, base) / n
    return r0, r1, n


def granger_estimate(traj: Trajectory,
                     cond_limit: float = DEFAULT_COND_LIMIT) -> EstimateReport:
    """Linear one-lag regression on raw (non-centred) state moments."""
    if traj.n_steps < 1:
        raise ValueError("granger_estimate needs at least one step")
    r0, r1, n = _raw_moments(traj)
    a_hat, cond = _solve_right(r1, r0, cond_limit, "zero-lag state moment matrix")
    return EstimateReport(
        A_hat=a_hat, estimator_kind="granger", n_samples=n, cond_F0=cond,
    )


def correlation_estimate(traj: Trajectory) -> EstimateReport:
    """Raw zero-lag moment matrix used directly as the estimate."""
    if traj.n_steps < 1:
        raise ValueError("correlation_estimate needs at least one step")
    r0, _, n = _raw_moments(traj)
    return EstimateReport(
        A_hat=r0, estimator_kind="correlation", n_samples=n, cond_F0=None,
    )


def precision_estimate(traj: Trajectory,
                       cond_limit: float = DEFAULT_COND_LIMIT) -> EstimateReport:
    """Inverse of the raw zero-lag moment matrix."""
    if traj.n_steps < 1:
        raise ValueError("precision_estimate needs at least one step")
    r0, _, n = _raw_moments(traj)
    a_hat, cond = _solve_right(np.eye(traj.n_nodes), r0, cond_limit,
                               "zero-lag state moment matrix")
    return EstimateReport(
        A_hat=a_hat, estimator_kind="precision", n_samples=n, cond_F0=cond,
    )


def least_squares_estimate(traj: Trajectory, triple: NonlinearityTriple,
                           config: WeightingConfig | None = None) -> EstimateReport:
    """Direct least-squares fit of the weighted one-step regression.

    Stacks the per-step problem ``omega(y[k]) * sigma^{-1}(y[k+1]) ~=
    B h(y[k])`` and solves it with an SVD-based least-squares routine,
    bypassing the lag-moment accumulator entirely.  Singular base states in
    exact mode contribute a zero target row, matching the accumulator's
    drop-the-step convention.  A rank-deficient design aborts with a
    near-singular error.
    """
    config = config or WeightingConfig()
    if triple.n_nodes != traj.n_nodes:
        raise ValueError(
            f"dimension mismatch: trajectory {traj.n_nodes}, "
            f"triple {triple.n_nodes}"
        )
    n = traj.n_steps
    if n < 1:
        raise ValueError("least_squares_estimate needs at least one step")
    base = traj.states[:n]
    design = triple.eval_h(base)
    weights, in_z = lagmoments._omega_block(triple, config, base)
    with np.errstate(invalid="ignore"):
        targets = weights * triple.eval_sigma.inverse(
            traj.states[1:n + 1], epoch_offset=1
        )
    if in_z.any():
        targets[in_z] = 0.0
    coeffs, _, rank, singular_values = np.linalg.lstsq(design, targets, rcond=None)
    if rank < traj.n_nodes:
        cond = float(singular_values[0] / singular_values[-1]) \
            if singular_values[-1] > 0 else float("inf")
        raise NearSingularError("least-squares design is rank deficient", cond)
    cond_f0 = float((singular_values[0] / singular_values[-1]) ** 2)
    return EstimateReport(
        A_hat=coeffs.T, estimator_kind="least_squares", n_samples=n,
        cond_F0=cond_f0,
    )


def partial_estimate(traj: Trajectory, observed: Sequence[int], kind: str,
                     triple: NonlinearityTriple | None = None,
                     config: WeightingConfig | None = None,
                     cond_limit: float = DEFAULT_COND_LIMIT) -> EstimateReport:
    """Estimate the subnetwork matrix from an observed subset of nodes.

    Only the observed columns of the trajectory are read: the states are
    projected onto ``observed`` first and all moments are formed in the
    reduced coordinates.  ``kind`` selects the weighted ("egg") or raw
    ("granger") regression.
    """
    if observed is None:
        raise ValueError("observed node set is required for partial estimation")
    observed = sorted(int(v) for v in observed)
    if not observed:
        raise ValueError("observed set must be non-empty")
    if len(set(observed)) != len(observed):
        raise ValueError("observed set must contain distinct nodes")
    if observed[0] < 0 or observed[-1] >= traj.n_nodes:
        raise ValueError(
            f"observed nodes must lie in [0, {traj.n_nodes}), got {observed}"
        )
    sub_states = traj.states[:, observed]
    sub_traj = Trajectory(
        n_nodes=len(observed), n_steps=traj.n_steps, states=sub_states,
        seed=traj.seed, triple_id=f"{traj.triple_id}|subset",
    )
    if kind == "egg":
        if triple is None:
            raise ValueError("partial egg estimation requires the triple")
        report = egg_from_trajectory(
            sub_traj, triple.restrict(observed), config, cond_limit=cond_limit
        )
        new_kind = "egg_partial"
    elif kind == "granger":
        report = granger_estimate(sub_traj, cond_limit=cond_limit)
        new_kind = "granger_partial"
    else:
        raise ValueError(
            f"kind must be 'egg' or 'granger' for partial estimation, got {kind!r}"
        )
    return EstimateReport(
        A_hat=report.A_hat, estimator_kind=new_kind,
        n_samples=report.n_samples, cond_F0=report.cond_F0,
        observed_set=tuple(observed),
    )
