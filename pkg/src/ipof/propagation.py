"""Iterated neighbor-consensus averaging of outlier scores.

Each synchronous step replaces every score with the mean of itself and the
scores of its nearest in-pointing sources (at most ``top_k`` of them, closest
first). The update is a row-stochastic linear map, so scores stay inside the
initial range and the iteration settles toward per-community consensus.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ipof._kernels import BACKEND, PropagationKernel
from ipof.detectors import ScoreVector
from ipof.graphs import CommonNeighborGraph

__all__ = [
    "PropagationConfig",
    "PropagationTrace",
    "propagate",
    "propagate_step",
    "connected_components",
    "write_trace",
    "write_snapshots",
    "backend_name",
]


def backend_name() -> str:
    """Which kernel implementation is active: 'native' or 'numpy'."""
    return BACKEND


@dataclass(frozen=True)
class PropagationConfig:
    """Settings for the averaging iteration.

    ``top_k`` is how many in-pointing sources each point averages over;
    iteration stops once the max per-point change drops to ``tolerance``
    or after ``max_iterations`` steps.
    """

    top_k: int = 10
    tolerance: float = 1e-9
    max_iterations: int = 10000
    record_trace: bool = False

    def __post_init__(self):
        if self.top_k < 1:
            raise ValueError("top_k must be >= 1")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be > 0")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


@dataclass(frozen=True)
class PropagationTrace:
    """What happened during one propagate() call.

    ``snapshots`` holds every iterate when tracing was on, otherwise just the
    first and last. ``step_deltas[t]`` is the max absolute change of step t+1.
    """

    snapshots: list[ScoreVector]
    step_deltas: np.ndarray
    iterations_run: int
    converged: bool


def _top_k_csr(cng: CommonNeighborGraph, top_k: int) -> tuple[np.ndarray, np.ndarray]:
    """Truncate each in-edge list to its first ``top_k`` sources (CSR form)."""
    degrees = np.diff(cng.indptr)
    take = np.minimum(degrees, top_k)
    indptr = np.zeros(cng.n + 1, dtype=np.int64)
    np.cumsum(take, out=indptr[1:])
    offsets = np.arange(indptr[-1], dtype=np.int64) - np.repeat(indptr[:-1], take)
    indices = cng.sources[np.repeat(cng.indptr[:-1], take) + offsets]
    return indptr, indices


def propagate_step(scores: ScoreVector, cng: CommonNeighborGraph, top_k: int) -> ScoreVector:
    """One synchronous averaging update over the top-k in-edge graph."""
    if scores.n != cng.n:
        raise ValueError(f"scores length {scores.n} does not match graph size {cng.n}")
    if top_k < 1:
        raise ValueError("top_k must be >= 1")
    kernel = PropagationKernel(*_top_k_csr(cng, top_k))
    out = np.empty(scores.n)
    kernel.step(scores.scores, out)
    return ScoreVector(out, source=scores.source, iteration=scores.iteration + 1)


def propagate(
    scores: ScoreVector, cng: CommonNeighborGraph, config: PropagationConfig
) -> tuple[ScoreVector, PropagationTrace]:
    """Iterate averaging steps until the max per-point change reaches tolerance.

    The top-k graph is frozen once up front. Hitting ``max_iterations`` first
    is reported through ``converged=False``, never raised.
    """
    if scores.n != cng.n:
        raise ValueError(f"scores length {scores.n} does not match graph size {cng.n}")
    kernel = PropagationKernel(*_top_k_csr(cng, config.top_k))

    current = scores.scores.copy()
    out = np.empty_like(current)
    deltas: list[float] = []
    snapshots = [ScoreVector(current.copy(), scores.source, scores.iteration)]
    converged = False

    for step in range(1, config.max_iterations + 1):
        delta = kernel.step(current, out)
        current, out = out, current
        deltas.append(delta)
        if config.record_trace:
            snapshots.append(
                ScoreVector(current.copy(), scores.source, scores.iteration + step)
            )
        if delta <= config.tolerance:
            converged = True
            break

    final = ScoreVector(current.copy(), scores.source, scores.iteration + len(deltas))
    if not config.record_trace:
        snapshots.append(final)
    trace = PropagationTrace(
        snapshots=snapshots,
        step_deltas=np.asarray(deltas),
        iterations_run=len(deltas),
        converged=converged,
    )
    return final, trace


def connected_components(cng: CommonNeighborGraph, top_k: int) -> list[np.ndarray]:
    """Weakly connected components of the top-k in-edge graph propagation uses.

    Returns sorted index arrays, ordered by their smallest member.
    """
    indptr, indices = _top_k_csr(cng, top_k)
    parent = np.arange(cng.n, dtype=np.int64)

    def find(x: int) -> int:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:  # path compression
            parent[x], x = root, parent[x]
        return root

    targets = np.repeat(np.arange(cng.n, dtype=np.int64), np.diff(indptr))
    for a, b in zip(targets.tolist(), indices.tolist()):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    roots = np.array([find(i) for i in range(cng.n)])
    groups: dict[int, list[int]] = {}
    for i, r in enumerate(roots.tolist()):
        groups.setdefault(r, []).append(i)
    return [np.asarray(groups[r], dtype=np.int64) for r in sorted(groups)]


def write_trace(trace: PropagationTrace, path: str | Path) -> None:
    """One ``t,max_delta`` line per iteration, full-precision deltas."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for t, delta in enumerate(trace.step_deltas.tolist(), start=1):
            fh.write(f"{t},{repr(delta)}\n")


def write_snapshots(trace: PropagationTrace, path: str | Path) -> None:
    """Per-iteration score matrix, one snapshot per row, full precision."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for snap in trace.snapshots:
            fh.write(",".join(repr(v) for v in snap.scores.tolist()) + "\n")
