"""First-stage outlier scorers: LOF, k-NN distance, and external score files.

Every producer follows the same orientation contract: larger score means
more outlying. External files are taken at face value and never flipped.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ipof.data import Dataset
from ipof.graphs import build_knn

__all__ = ["ScoreVector", "lof_scores", "knn_distance_scores", "load_scores", "minmax_normalize"]

# Guard against infinite local reachability density when a point and its
# whole neighborhood coincide.
_LRD_EPSILON = 1e-12


@dataclass(frozen=True)
class ScoreVector:
    """One outlier score per point, tagged with its producer and iteration."""

    scores: np.ndarray
    source: str
    iteration: int = 0

    def __post_init__(self):
        scores = np.ascontiguousarray(np.asarray(self.scores, dtype=np.float64))
        if scores.ndim != 1:
            raise ValueError(f"scores must be 1-D, got shape {scores.shape}")
        if not np.all(np.isfinite(scores)):
            bad = int(np.flatnonzero(~np.isfinite(scores))[0])
            raise ValueError(f"non-finite score at index {bad}")
        if self.iteration < 0:
            raise ValueError("iteration must be non-negative")
        object.__setattr__(self, "scores", scores)

    @property
    def n(self) -> int:
        return self.scores.shape[0]


def lof_scores(dataset: Dataset, neighbors: int = 10) -> ScoreVector:
    """Local outlier factor of every point.

    For each point: reachability distance to a neighbor o is
    max(k-distance(o), d(p, o)); local reachability density (lrd) is the
    inverse mean reachability distance over the k nearest neighbors; the
    score is the mean ratio lrd(neighbor)/lrd(self). Scores near 1 mean
    inlier, larger means more isolated than the neighborhood.

    The neighborhood is the deterministically tie-broken k nearest points.
    """
    n = dataset.n
    if not 2 <= neighbors <= n - 1:
        raise ValueError(f"neighbors={neighbors} out of range (need 2 <= neighbors <= n-1)")
    graph = build_knn(dataset, k=neighbors)
    idx = graph.indices
    dist = graph.distances
    k_distance = dist[:, -1]

    reach = np.maximum(k_distance[idx], dist)
    lrd = 1.0 / (reach.mean(axis=1) + _LRD_EPSILON)
    scores = (lrd[idx] / lrd[:, None]).mean(axis=1)
    return ScoreVector(scores=scores, source=f"lof({neighbors})", iteration=0)


def knn_distance_scores(dataset: Dataset, neighbors: int = 10) -> ScoreVector:
    """Distance to the neighbors-th nearest neighbor as the outlier score."""
    n = dataset.n
    if not 1 <= neighbors <= n - 1:
        raise ValueError(f"neighbors={neighbors} out of range (need 1 <= neighbors <= n-1)")
    graph = build_knn(dataset, k=neighbors)
    return ScoreVector(
        scores=graph.distances[:, -1].copy(), source=f"knnd({neighbors})", iteration=0
    )


def load_scores(path: str | Path, expected_n: int) -> ScoreVector:
    """Read one score per line, or ``index,score`` lines covering 0..n-1 once each."""
    path = Path(path)
    with open(path, "r", encoding="utf-8") as fh:
        lines = [(no + 1, line.strip()) for no, line in enumerate(fh) if line.strip()]

    if len(lines) != expected_n:
        raise ValueError(f"{path}: expected {expected_n} scores, found {len(lines)} lines")

    indexed = "," in lines[0][1]
    scores = np.empty(expected_n, dtype=np.float64)
    seen = np.zeros(expected_n, dtype=bool)
    for position, (lineno, text) in enumerate(lines):
        fields = text.split(",")
        if indexed:
            if len(fields) != 2:
                raise ValueError(f"{path}: line {lineno}: expected 'index,score'")
            try:
                idx = int(fields[0])
            except ValueError:
                raise ValueError(f"{path}: line {lineno}: bad index {fields[0]!r}") from None
            if not 0 <= idx < expected_n:
                raise ValueError(f"{path}: line {lineno}: index {idx} out of range")
            if seen[idx]:
                raise ValueError(f"{path}: line {lineno}: duplicate index {idx}")
            value_text = fields[1]
        else:
            if len(fields) != 1:
                raise ValueError(f"{path}: line {lineno}: expected a single score")
            idx = position
            value_text = fields[0]
        try:
            value = float(value_text)
        except ValueError:
            raise ValueError(f"{path}: line {lineno}: cannot parse {value_text!r}") from None
        if not np.isfinite(value):
            raise ValueError(f"{path}: line {lineno}: non-finite score {value_text!r}")
        scores[idx] = value
        seen[idx] = True

    if not seen.all():
        missing = int(np.flatnonzero(~seen)[0])
        raise ValueError(f"{path}: no score for index {missing}")
    return ScoreVector(scores=scores, source=path.stem, iteration=0)


def minmax_normalize(scores: ScoreVector) -> ScoreVector:
    """Rescale scores to [0, 1]; a constant vector maps to all 0.5."""
    lo = float(scores.scores.min())
    hi = float(scores.scores.max())
    if hi == lo:
        rescaled = np.full(scores.n, 0.5)
    else:
        rescaled = (scores.scores - lo) / (hi - lo)
    return ScoreVector(rescaled, source=scores.source, iteration=scores.iteration)
