"""Networked dynamical system with multiplicative nonlinear coupling.

The state of an ``N``-node network evolves as

    y[n+1] = sigma( g(y[n]) * (A @ h(y[n])) + x[n+1] )

where ``sigma``, ``g`` and ``h`` apply componentwise (node ``i`` uses its
own scalar functions), ``A`` is a combination matrix and ``x`` is i.i.d.
Gaussian noise.  ``sigma`` must be invertible so that trajectories can be
mapped to the additive representation ``z[n] = sigma^{-1}(y[n])``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import FunctionDomainError, SimulationDivergedError
from .graphs import CombinationMatrix
from .nonlinearities import Nonlinearity

#: States whose magnitude exceeds this are treated as diverged.
DIVERGENCE_LIMIT = 1e12

#: Tolerance used when checking that growth exponents sum to one.
_PQ_TOL = 1e-9


def resolve_exponents(g_fns: Sequence[Nonlinearity],
                      h_fns: Sequence[Nonlinearity]) -> tuple[float, float, bool]:
    """Resolve the growth exponents (p, q) of the g and h families.

    Within a family all declared exponents must agree; bounded members
    (``exponent_role=None``) conform to any exponent.  A family with no
    declared exponent inherits the complement of the other family's, and
    when neither declares one the convention ``(p, q) = (0, 1)`` is used
    (immaterial, since both alphas are then zero).

    Returns ``(p, q, ok)`` where ``ok`` records whether ``p + q = 1``
    within tolerance; raises ``ValueError`` on conflicting declarations
    within a family.
    """
    def family_role(fns: Sequence[Nonlinearity], name: str) -> float | None:
        declared = {fn.exponent_role for fn in fns if fn.exponent_role is not None}
        if len(declared) > 1:
            raise ValueError(
                f"conflicting growth exponents in {name} family: {sorted(declared)}"
            )
        return declared.pop() if declared else None

    p = family_role(g_fns, "g")
    q = family_role(h_fns, "h")
    if p is None and q is None:
        p, q = 0.0, 1.0
    elif p is None:
        p = 1.0 - q
    elif q is None:
        q = 1.0 - p
    ok = abs(p + q - 1.0) <= _PQ_TOL and 0.0 <= p <= 1.0 and 0.0 <= q <= 1.0
    return float(p), float(q), ok


class _Family:
    """Per-node scalar functions of one kind (sigma, g or h), vectorised.

    Equal nonlinearities are grouped so homogeneous families cost a single
    array operation per evaluation.
    """

    def __init__(self, fns: Sequence[Nonlinearity]):
        self.fns = tuple(fns)
        groups: list[tuple[Nonlinearity, list[int]]] = []
        index: dict[Nonlinearity, int] = {}
        for node, fn in enumerate(self.fns):
            if fn not in index:
                index[fn] = len(groups)
                groups.append((fn, []))
            groups[index[fn]][1].append(node)
        self.homogeneous = len(groups) == 1
        self._groups = [(fn, np.asarray(idx)) for fn, idx in groups]

    def __call__(self, y: np.ndarray) -> np.ndarray:
        """Evaluate componentwise; last axis indexes nodes."""
        if self.homogeneous:
            return self._groups[0][0].evaluate(y)
        out = np.empty_like(y, dtype=float)
        for fn, idx in self._groups:
            out[..., idx] = fn.evaluate(y[..., idx])
        return out

    def inverse(self, y: np.ndarray, epoch_offset: int = 0) -> np.ndarray:
        """Componentwise inverse with (epoch, node) context in errors.

        ``y`` has nodes on the last axis; for 2-d input the first axis is
        epochs starting at ``epoch_offset``.
        """
        out = np.empty_like(y, dtype=float)
        for fn, idx in self._groups:
            sub = y[..., idx]
            bad = fn.inverse_domain_mask(sub)
            if bad is not None and np.any(bad):
                flat = int(np.argmax(bad))
                pos = np.unravel_index(flat, np.shape(sub))
                node = int(idx[pos[-1]])
                epoch = epoch_offset + int(pos[0]) if np.ndim(sub) == 2 else None
                raise FunctionDomainError(
                    f"input outside the domain of {fn.describe()} inverse",
                    float(sub[pos]), node=node, epoch=epoch,
                )
            out[..., idx] = fn.evaluate_inverse(sub)
        return out


@dataclass(frozen=True)
class NonlinearityTriple:
    """Per-node (sigma, g, h) functions of an ``N``-node network.

    Construction validates that all sigma components are invertible and
    that the declared growth exponents of g and h are mutually consistent
    (they must sum to one when both families declare one).
    """

    sigma: tuple[Nonlinearity, ...]
    g: tuple[Nonlinearity, ...]
    h: tuple[Nonlinearity, ...]
    triple_id: str = "custom"

    def __post_init__(self):
        object.__setattr__(self, "sigma", tuple(self.sigma))
        object.__setattr__(self, "g", tuple(self.g))
        object.__setattr__(self, "h", tuple(self.h))
        n = len(self.sigma)
        if n == 0 or len(self.g) != n or len(self.h) != n:
            raise ValueError(
                "sigma, g and h must be non-empty and of equal length, got "
                f"{len(self.sigma)}/{len(self.g)}/{len(self.h)}"
            )
        for node, fn in enumerate(self.sigma):
            if not fn.invertible:
                raise ValueError(
                    f"sigma must be invertible at every node; node {node} "
                    f"has {fn.describe()}"
                )
        p, q, ok = resolve_exponents(self.g, self.h)
        if not ok:
            raise ValueError(
                f"growth exponents of g and h must sum to 1, got p={p}, q={q}"
            )

    @classmethod
    def uniform(cls, sigma: Nonlinearity, g: Nonlinearity, h: Nonlinearity,
                n_nodes: int, triple_id: str = "custom") -> "NonlinearityTriple":
        """Same (sigma, g, h) at every node."""
        return cls(
            sigma=(sigma,) * n_nodes,
            g=(g,) * n_nodes,
            h=(h,) * n_nodes,
            triple_id=triple_id,
        )

    @property
    def n_nodes(self) -> int:
        return len(self.sigma)

    @cached_property
    def eval_sigma(self) -> _Family:
        return _Family(self.sigma)

    @cached_property
    def eval_g(self) -> _Family:
        return _Family(self.g)

    @cached_property
    def eval_h(self) -> _Family:
        return _Family(self.h)

    def restrict(self, nodes: Sequence[int]) -> "NonlinearityTriple":
        """Sub-triple over an observed subset of nodes (order preserved)."""
        nodes = [int(v) for v in nodes]
        return NonlinearityTriple(
            sigma=tuple(self.sigma[v] for v in nodes),
            g=tuple(self.g[v] for v in nodes),
            h=tuple(self.h[v] for v in nodes),
            triple_id=f"{self.triple_id}|subset",
        )


@dataclass(frozen=True)
class NoiseModel:
    """Zero-mean Gaussian excitation with per-node standard deviations.

    A standard deviation of zero silences that node's noise, which is
    handy for deterministic runs; the estimator consistency guarantees
    assume every node is excited (all deviations strictly positive).
    """

    per_node_std: np.ndarray

    def __post_init__(self):
        std = np.atleast_1d(np.asarray(self.per_node_std, dtype=float))
        if std.ndim != 1:
            raise ValueError("per_node_std must be one-dimensional")
        if not (np.all(np.isfinite(std)) and np.all(std >= 0)):
            raise ValueError("per_node_std entries must be finite and >= 0")
        std = std.copy()
        std.setflags(write=False)
        object.__setattr__(self, "per_node_std", std)

    @classmethod
    def uniform(cls, n_nodes: int, std: float = 1.0) -> "NoiseModel":
        return cls(per_node_std=np.full(n_nodes, float(std)))

    @property
    def n_nodes(self) -> int:
        return len(self.per_node_std)


@dataclass(frozen=True)
class Trajectory:
    """A simulated state history.

    ``states`` has shape ``(n_steps + 1, n_nodes)``; row 0 is the initial
    condition.  All entries are finite by construction.
    """

    n_nodes: int
    n_steps: int
    states: np.ndarray
    seed: int
    triple_id: str = "custom"

    def __post_init__(self):
        states = np.asarray(self.states, dtype=float)
        if states.shape != (self.n_steps + 1, self.n_nodes):
            raise ValueError(
                f"states shape {states.shape} does not match "
                f"(n_steps + 1, n_nodes) = {(self.n_steps + 1, self.n_nodes)}"
            )
        if not np.all(np.isfinite(states)):
            raise ValueError("trajectory states must all be finite")
        states = states.copy()
        states.setflags(write=False)
        object.__setattr__(self, "states", states)


def simulate(matrix: CombinationMatrix, triple: NonlinearityTriple,
             noise: NoiseModel, y0: "np.ndarray | float", n_steps: int,
             seed: int) -> Trajectory:
    """Run the coupled recursion for ``n_steps`` epochs.

    Noise is drawn from a single PCG64 stream seeded with ``seed``: epoch
    ``k`` consumes the ``k``-th block of ``n_nodes`` standard normals (drawn
    in chunks, which leaves the stream identical to a one-shot draw), then
    scaled by the per-node standard deviations.  A state with a non-finite
    entry or magnitude above ``DIVERGENCE_LIMIT`` aborts the run with the
    first offending epoch and node.

    Parameters
    ----------
    matrix : CombinationMatrix
        Coupling weights; ``matrix.entries[i, j]`` scales the influence of
        node ``j`` on node ``i``.
    triple : NonlinearityTriple
        Per-node (sigma, g, h) functions.
    noise : NoiseModel
        Per-node Gaussian noise scales.
    y0 : float or array of shape (n_nodes,)
        Initial condition (a scalar is broadcast to all nodes).
    n_steps : int
        Number of epochs to advance.
    seed : int
        Noise stream seed.
    """
    n = matrix.n_nodes
    if triple.n_nodes != n or noise.n_nodes != n:
        raise ValueError(
            f"dimension mismatch: matrix {n}, triple {triple.n_nodes}, "
            f"noise {noise.n_nodes}"
        )
    if n_steps < 0:
        raise ValueError(f"n_steps must be >= 0, got {n_steps}")
    y0 = np.broadcast_to(np.asarray(y0, dtype=float), (n,)).copy()
    if not np.all(np.isfinite(y0)):
        raise ValueError("y0 must be finite")

    states = np.empty((n_steps + 1, n))
    states[0] = y0
    rng = np.random.default_rng(seed)
    a_entries = matrix.entries
    std = noise.per_node_std
    unit_std = bool(np.all(std == 1.0))
    eval_sigma, eval_g, eval_h = triple.eval_sigma, triple.eval_g, triple.eval_h

    chunk = 65536
    y = states[0]
    done = 0
    while done < n_steps:
        m = min(chunk, n_steps - done)
        block = rng.standard_normal((m, n))
        if not unit_std:
            block *= std
        for t in range(m):
            drive = eval_g(y) * (a_entries @ eval_h(y))
            drive += block[t]
            y = eval_sigma(drive)
            peak = np.abs(y).max()
            if not peak <= DIVERGENCE_LIMIT:
                bad = ~(np.abs(y) <= DIVERGENCE_LIMIT)
                node = int(np.argmax(bad))
                raise SimulationDivergedError(
                    epoch=done + t + 1, node=node, value=float(y[node])
                )
            states[done + t + 1] = y
        done += m
    return Trajectory(
        n_nodes=n, n_steps=n_steps, states=states, seed=seed,
        triple_id=triple.triple_id,
    )


def transform_to_additive(traj: Trajectory,
                          triple: NonlinearityTriple) -> Trajectory:
    """Map a trajectory through ``sigma^{-1}`` componentwise.

    The result follows the additive recursion
    ``z[n+1] = g(sigma(z[n])) * (A @ h(sigma(z[n]))) + x[n+1]``.  States
    outside the domain of some ``sigma_i^{-1}`` raise a domain error naming
    epoch and node.
    """
    if triple.n_nodes != traj.n_nodes:
        raise ValueError(
            f"dimension mismatch: trajectory {traj.n_nodes}, "
            f"triple {triple.n_nodes}"
        )
    z = triple.eval_sigma.inverse(traj.states, epoch_offset=0)
    return Trajectory(
        n_nodes=traj.n_nodes, n_steps=traj.n_steps, states=z,
        seed=traj.seed, triple_id=f"{traj.triple_id}|additive",
    )
