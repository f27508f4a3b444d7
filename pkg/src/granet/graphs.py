"""Directed graphs and combination matrices.

A directed edge ``(i, j)`` means *node j directly influences node i*; the
corresponding weight lives in slot ``A[i, j]`` of a combination matrix.
Combination matrices follow a uniform averaging rule: node ``i`` splits a
total mass ``rho`` evenly over its in-neighbourhood, which always counts
node ``i`` itself, so every diagonal entry is strictly positive and every
row sums to exactly ``rho``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

Edge = tuple[int, int]


@dataclass(frozen=True)
class DirectedGraph:
    """Directed graph on nodes ``0 .. n_nodes - 1``.

    Parameters
    ----------
    n_nodes : int
        Number of nodes, at least 1.
    edges : iterable of (int, int)
        Ordered pairs ``(i, j)``: node ``j`` influences node ``i``.
    includes_self_loops : bool
        Whether edges of the form ``(i, i)`` are permitted.
    """

    n_nodes: int
    edges: frozenset[Edge] = field(default_factory=frozenset)
    includes_self_loops: bool = False

    def __post_init__(self):
        if self.n_nodes < 1:
            raise ValueError(f"n_nodes must be >= 1, got {self.n_nodes}")
        normalized = frozenset((int(i), int(j)) for i, j in self.edges)
        object.__setattr__(self, "edges", normalized)
        for i, j in normalized:
            if not (0 <= i < self.n_nodes and 0 <= j < self.n_nodes):
                raise ValueError(
                    f"edge ({i}, {j}) out of range for n_nodes={self.n_nodes}"
                )
            if i == j and not self.includes_self_loops:
                raise ValueError(f"self-loop ({i}, {i}) not permitted")

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def has_edge(self, i: int, j: int) -> bool:
        """True when node ``j`` influences node ``i``."""
        return (i, j) in self.edges

    def in_degree(self, i: int) -> int:
        """Number of incoming edges of node ``i`` (self-loop counted once)."""
        return sum(1 for a, _ in self.edges if a == i)

    def adjacency(self) -> np.ndarray:
        """Boolean matrix with ``adj[i, j]`` true iff edge ``(i, j)`` exists."""
        adj = np.zeros((self.n_nodes, self.n_nodes), dtype=bool)
        for i, j in self.edges:
            adj[i, j] = True
        return adj

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)


@dataclass(frozen=True)
class CombinationMatrix:
    """Weight matrix of the uniform averaging rule.

    ``entries[i, j]`` is the weight node ``i`` assigns to node ``j``.  Rows
    sum to ``rho`` and all entries are non-negative, so the infinity norm of
    the matrix equals ``rho``.
    """

    n_nodes: int
    rho: float
    entries: np.ndarray

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=float)
        if entries.shape != (self.n_nodes, self.n_nodes):
            raise ValueError(
                f"entries shape {entries.shape} does not match "
                f"n_nodes={self.n_nodes}"
            )
        if not 0 < self.rho < 1:
            raise ValueError(f"rho must lie in (0, 1), got {self.rho}")
        entries = entries.copy()
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    def row_sum_deviation(self) -> float:
        """Largest absolute deviation of a row sum from ``rho``."""
        return float(np.max(np.abs(self.entries.sum(axis=1) - self.rho)))


def generate_binomial_graph(n_nodes: int, p: float, seed: int) -> DirectedGraph:
    """Draw a binomial (Erdos-Renyi) digraph without self-loops.

    Each ordered pair ``(i, j)`` with ``i != j`` is included independently
    with probability ``p``.  A full ``n x n`` block of uniforms is drawn and
    the diagonal discarded, so the result is reproducible for a given seed
    regardless of ``p``.

    Parameters
    ----------
    n_nodes : int
        Number of nodes.
    p : float
        Edge probability in ``[0, 1]``.
    seed : int
        Seed for the PCG64 generator.
    """
    if n_nodes < 1:
        raise ValueError(f"n_nodes must be >= 1, got {n_nodes}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    rng = np.random.default_rng(seed)
    mask = rng.random((n_nodes, n_nodes)) < p
    np.fill_diagonal(mask, False)
    edges = frozenset((int(i), int(j)) for i, j in zip(*np.nonzero(mask)))
    return DirectedGraph(n_nodes=n_nodes, edges=edges)


def build_combination_matrix(graph: DirectedGraph, rho: float) -> CombinationMatrix:
    """Assemble the uniform averaging matrix of a graph.

    Off-diagonal weights are ``rho / d_i`` on edges and zero elsewhere,
    where ``d_i`` is the in-degree of node ``i`` counting the node itself.
    The diagonal entry is set to ``rho`` minus the off-diagonal row sum, so
    each row sums to ``rho`` up to a final rounding.
    """
    if not 0 < rho < 1:
        raise ValueError(f"rho must lie in (0, 1), got {rho}")
    n = graph.n_nodes
    adj = graph.adjacency().astype(float)
    with_self = adj.copy()
    np.fill_diagonal(with_self, 1.0)
    degrees = with_self.sum(axis=1)
    entries = rho * adj / degrees[:, None]
    np.fill_diagonal(entries, 0.0)
    np.fill_diagonal(entries, rho - entries.sum(axis=1))
    return CombinationMatrix(n_nodes=n, rho=rho, entries=entries)


def support_offdiagonal(matrix: "CombinationMatrix | np.ndarray",
                        tol: float = 0.0) -> DirectedGraph:
    """Recover the off-diagonal support of a matrix as a directed graph.

    Entries with ``|a_ij| > tol`` and ``i != j`` become edges; the diagonal
    is ignored entirely.
    """
    a = np.asarray(getattr(matrix, "entries", matrix), dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if tol < 0:
        raise ValueError(f"tol must be >= 0, got {tol}")
    mask = np.abs(a) > tol
    np.fill_diagonal(mask, False)
    edges = frozenset((int(i), int(j)) for i, j in zip(*np.nonzero(mask)))
    return DirectedGraph(n_nodes=a.shape[0], edges=edges)


def subgraph(graph: DirectedGraph, nodes: Sequence[int]) -> DirectedGraph:
    """Induced subgraph on ``nodes``, relabelled to ``0 .. len(nodes) - 1``.

    ``nodes`` must be distinct and in range; the relabelling follows the
    order in which they are given.
    """
    nodes = [int(v) for v in nodes]
    if len(set(nodes)) != len(nodes):
        raise ValueError("nodes must be distinct")
    for v in nodes:
        if not 0 <= v < graph.n_nodes:
            raise ValueError(f"node {v} out of range")
    local = {v: k for k, v in enumerate(nodes)}
    edges = frozenset(
        (local[i], local[j])
        for i, j in graph.edges
        if i in local and j in local
    )
    return DirectedGraph(
        n_nodes=len(nodes),
        edges=edges,
        includes_self_loops=graph.includes_self_loops,
    )
