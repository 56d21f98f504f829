"""Graph and series containers plus the two series standardizations."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on dense node ids ``0..n_nodes-1``.

    Build through :func:`graph_from_edges`; the constructor assumes the
    edge array is already canonical (``i < j``, sorted, unique).
    """

    n_nodes: int
    edges: np.ndarray  # (E, 2) int, rows (i, j) with i < j
    neighbor_index: tuple[np.ndarray, ...] = field(repr=False)

    @property
    def n_edges(self) -> int:
        return int(self.edges.shape[0])

    def neighbors(self, i: int) -> np.ndarray:
        return self.neighbor_index[i]

    def degrees(self) -> np.ndarray:
        return np.array([len(nb) for nb in self.neighbor_index], dtype=np.int64)

    def edge_list(self) -> list[tuple[int, int]]:
        return [(int(i), int(j)) for i, j in self.edges]

    def incidence(self) -> list[list[tuple[int, int]]]:
        """Per node, the ``(edge index, sign)`` pairs it takes part in.

        ``sign`` is +1 when the node is the first (smaller) endpoint.
        """
        out: list[list[tuple[int, int]]] = [[] for _ in range(self.n_nodes)]
        for e, (i, j) in enumerate(self.edges):
            out[int(i)].append((e, 1))
            out[int(j)].append((e, -1))
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n_nodes == other.n_nodes and np.array_equal(self.edges, other.edges)

    def __hash__(self) -> int:
        return hash((self.n_nodes, self.edges.tobytes()))


def graph_from_edges(n_nodes: int, edges: Iterable[Sequence[int]]) -> Graph:
    """Canonicalize an edge list into a :class:`Graph`.

    Pairs are stored as ``(min, max)``; duplicates in either orientation
    collapse to one edge.

    Raises
    ------
    ValueError
        On ``n_nodes < 1``, a self-loop, or an endpoint outside
        ``[0, n_nodes)``.
    """
    if n_nodes < 1:
        raise ValueError(f"n_nodes must be >= 1, got {n_nodes}")
    canon = set()
    for pair in edges:
        i, j = int(pair[0]), int(pair[1])
        if i == j:
            raise ValueError(f"self-loop at node {i}")
        for v in (i, j):
            if not 0 <= v < n_nodes:
                raise ValueError(f"endpoint {v} out of range [0, {n_nodes})")
        canon.add((min(i, j), max(i, j)))
    arr = np.array(sorted(canon), dtype=np.int64).reshape(-1, 2)
    nbrs: list[list[int]] = [[] for _ in range(n_nodes)]
    for i, j in arr:
        nbrs[i].append(int(j))
        nbrs[j].append(int(i))
    index = tuple(np.array(sorted(nb), dtype=np.int64) for nb in nbrs)
    arr.setflags(write=False)
    for nb in index:
        nb.setflags(write=False)
    return Graph(n_nodes=n_nodes, edges=arr, neighbor_index=index)


@dataclass(frozen=True)
class NodeSeries:
    """``N x n`` matrix of observations, row ``i`` is the series at node ``i``."""

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64)
        if v.ndim != 2:
            raise ValueError(f"series matrix must be 2-D, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("series contain non-finite entries")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n_nodes(self) -> int:
        return self.values.shape[0]

    @property
    def n(self) -> int:
        return self.values.shape[1]

    def check_graph(self, graph: Graph) -> None:
        if self.n_nodes != graph.n_nodes:
            raise ValueError(
                f"series has {self.n_nodes} rows but graph has {graph.n_nodes} nodes")


def standardize_seasonal(series, period: int, n_periods: int) -> np.ndarray:
    """Remove per-season mean and scale.

    Entry ``k*period + v`` becomes ``(y - m_v) / s_v`` where ``m_v`` and
    ``s_v`` are the sample mean and unbiased standard deviation of season
    ``v`` across the ``n_periods`` cycles.
    """
    y = np.asarray(series, dtype=np.float64)
    if y.ndim != 1 or y.size != period * n_periods:
        raise ValueError(f"series length {y.size} != period*n_periods = {period * n_periods}")
    if n_periods < 2:
        raise ValueError("need at least two periods")
    grid = y.reshape(n_periods, period)
    mean = grid.mean(axis=0)
    sd = grid.std(axis=0, ddof=1)
    bad = np.flatnonzero(sd == 0)
    if bad.size:
        raise ValueError(f"zero variance in season {int(bad[0])}")
    return ((grid - mean) / sd).reshape(-1)


def standardize_zscore(series) -> np.ndarray:
    y = np.asarray(series, dtype=np.float64)
    if y.size < 2:
        raise ValueError("need at least two observations")
    sd = y.std(ddof=1)
    if sd == 0:
        raise ValueError("zero variance series")
    return (y - y.mean()) / sd
