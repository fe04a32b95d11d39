"""Exact k-nearest-neighbor graphs and their in-edge (common-neighbor) transpose."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ipof.data import Dataset

__all__ = [
    "NeighborGraph",
    "CommonNeighborGraph",
    "build_knn",
    "build_common_neighbors",
    "top_in_edges",
    "write_edges",
]

_METRICS = ("euclidean", "manhattan")

# Pairwise distance blocks are capped near this many float64 entries.
_BLOCK_BUDGET = 4_000_000


@dataclass(frozen=True)
class NeighborGraph:
    """Per-point ordered nearest-neighbor lists.

    ``indices[i]`` holds the min(k, n-1) nearest neighbors of point i,
    ascending by (distance, index); ``distances[i]`` the matching distances.
    Self-edges never appear.
    """

    k: int
    indices: np.ndarray
    distances: np.ndarray
    metric: str = "euclidean"

    @property
    def n(self) -> int:
        return self.indices.shape[0]

    def neighbors(self, i: int) -> list[tuple[int, float]]:
        """The (index, distance) pairs of point i's list, nearest first."""
        return list(zip(self.indices[i].tolist(), self.distances[i].tolist()))


@dataclass(frozen=True)
class CommonNeighborGraph:
    """Transpose of a NeighborGraph: who points at whom.

    CSR layout: the sources whose neighbor lists contain point i sit in
    ``sources[indptr[i]:indptr[i+1]]``, ascending by (distance, source index),
    with the same distances the forward edges carried.
    """

    indptr: np.ndarray
    sources: np.ndarray
    distances: np.ndarray

    @property
    def n(self) -> int:
        return self.indptr.shape[0] - 1

    def in_edges(self, i: int) -> list[tuple[int, float]]:
        lo, hi = self.indptr[i], self.indptr[i + 1]
        return list(zip(self.sources[lo:hi].tolist(), self.distances[lo:hi].tolist()))

    def in_degree(self, i: int) -> int:
        return int(self.indptr[i + 1] - self.indptr[i])


def _distance_block(points: np.ndarray, start: int, stop: int, metric: str) -> np.ndarray:
    """Distances from points[start:stop] to every point, one feature at a time.

    Accumulating per feature keeps peak memory at one (block, n) buffer and
    makes the arithmetic identical for every block split.
    """
    block = points[start:stop]
    n = points.shape[0]
    acc = np.zeros((block.shape[0], n))
    if metric == "euclidean":
        for f in range(points.shape[1]):
            diff = block[:, f, None] - points[None, :, f]
            acc += diff * diff
        return np.sqrt(acc)
    for f in range(points.shape[1]):
        acc += np.abs(block[:, f, None] - points[None, :, f])
    return acc


def build_knn(dataset: Dataset, k: int, metric: str = "euclidean") -> NeighborGraph:
    """Exact k-nearest-neighbor lists with ties broken by smaller index.

    Distances are computed against all points in row blocks; each row keeps
    its min(k, n-1) smallest entries under the (distance, index) order.
    """
    n = dataset.n
    if not 1 <= k <= n - 1:
        raise ValueError(f"k={k} out of range for n={n} (need 1 <= k <= n-1)")
    if metric not in _METRICS:
        raise ValueError(f"unknown metric {metric!r}; supported: {_METRICS}")

    m = min(k, n - 1)
    indices = np.empty((n, m), dtype=np.int64)
    distances = np.empty((n, m), dtype=np.float64)
    rows_per_block = max(1, _BLOCK_BUDGET // n)

    for start in range(0, n, rows_per_block):
        stop = min(start + rows_per_block, n)
        dist = _distance_block(dataset.points, start, stop, metric)
        rows = np.arange(start, stop)
        dist[np.arange(stop - start), rows] = np.inf  # exclude self

        if m < n - 1:
            part = np.argpartition(dist, m - 1, axis=1)[:, :m]
        else:
            part = np.tile(np.arange(n), (stop - start, 1))
        part_d = np.take_along_axis(dist, part, axis=1)
        order = np.lexsort((part, part_d), axis=1)[:, :m]
        sel_i = np.take_along_axis(part, order, axis=1)
        sel_d = np.take_along_axis(part_d, order, axis=1)

        if m < n - 1:
            _fix_boundary_ties(dist, sel_i, sel_d)

        indices[start:stop] = sel_i
        distances[start:stop] = sel_d

    return NeighborGraph(k=k, indices=indices, distances=distances, metric=metric)


def _fix_boundary_ties(dist: np.ndarray, sel_i: np.ndarray, sel_d: np.ndarray) -> None:
    """Re-select rows where a distance tie straddles the partition boundary.

    argpartition picks an arbitrary subset of entries tied at the cutoff
    distance; the contract wants the smallest indices among them.
    """
    m = sel_i.shape[1]
    cutoff = sel_d[:, -1]
    tied_total = (dist == cutoff[:, None]).sum(axis=1)
    tied_kept = (sel_d == cutoff[:, None]).sum(axis=1)
    for r in np.flatnonzero(tied_total > tied_kept):
        tied = np.flatnonzero(dist[r] == cutoff[r])
        strict = np.flatnonzero(dist[r] < cutoff[r])
        take = tied[: m - len(strict)]
        merged = np.concatenate([strict, take])
        d = dist[r, merged]
        order = np.lexsort((merged, d))
        sel_i[r] = merged[order]
        sel_d[r] = d[order]


def build_common_neighbors(graph: NeighborGraph) -> CommonNeighborGraph:
    """Exact transpose of the directed edge set, in-edges sorted by (distance, source)."""
    n, m = graph.indices.shape
    dst = graph.indices.ravel()
    src = np.repeat(np.arange(n, dtype=np.int64), m)
    d = graph.distances.ravel()

    order = np.lexsort((src, d, dst))
    dst, src, d = dst[order], src[order], d[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(dst, minlength=n), out=indptr[1:])
    return CommonNeighborGraph(indptr=indptr, sources=src, distances=d)


def top_in_edges(cng: CommonNeighborGraph, i: int, limit: int) -> np.ndarray:
    """The first min(limit, in-degree) sources of point i's in-edge list."""
    if not 0 <= i < cng.n:
        raise IndexError(f"point index {i} out of range for n={cng.n}")
    if limit < 1:
        raise ValueError(f"limit must be >= 1, got {limit}")
    lo = cng.indptr[i]
    hi = min(lo + limit, cng.indptr[i + 1])
    return cng.sources[lo:hi].copy()


def write_edges(graph: NeighborGraph, path: str | Path, sources: np.ndarray | None = None) -> int:
    """Dump directed edges as ``src,dst,distance`` lines, distances via repr.

    ``sources`` restricts the dump to edges leaving those points. Returns the
    number of edges written.
    """
    rows = range(graph.n) if sources is None else np.asarray(sources, dtype=np.int64)
    written = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for i in rows:
            for j, d in zip(graph.indices[i], graph.distances[i]):
                fh.write(f"{int(i)},{int(j)},{repr(float(d))}\n")
                written += 1
    return written
