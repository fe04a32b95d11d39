"""Shared oracles, dataset helpers, and the acceptance-summary hook.

The oracle functions here deliberately take the slow, obvious route (full
sorts, per-pair enumeration, dense matrices) so they share no shortcut with
the library code they check.
"""

from __future__ import annotations

import numpy as np

from ipof.data import Dataset
from ipof.graphs import CommonNeighborGraph, top_in_edges

# ---------------------------------------------------------------------------
# acceptance criteria summary

_ACCEPTANCE: dict[int, tuple[str, str, str]] = {}


def record_criterion(number: int, name: str, status: str, detail: str = "") -> None:
    """Register a criterion outcome ('PASS', 'FAIL', or 'SKIP') for the summary."""
    _ACCEPTANCE[number] = (name, status, detail)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        name, status, detail = _ACCEPTANCE[number]
        line = f"criterion {number} ({name}): {status}"
        if detail:
            line += f" -- {detail}"
        terminalreporter.write_line(line)


# ---------------------------------------------------------------------------
# dataset helpers

def random_dataset(rng: np.random.Generator, n: int, dim: int, duplicates: bool = False) -> Dataset:
    points = rng.uniform(-5.0, 5.0, size=(n, dim))
    if duplicates and n >= 6:
        points[n // 3] = points[0]
        points[n // 3 + 1] = points[1]
    return Dataset(points=points)


def random_labels(rng: np.random.Generator, n: int) -> np.ndarray:
    # always at least one of each class
    labels = (rng.uniform(size=n) < 0.3).astype(np.int64)
    labels[0] = 1
    labels[1] = 0
    return labels


# ---------------------------------------------------------------------------
# oracles

def brute_knn(points: np.ndarray, k: int, metric: str = "euclidean"):
    """Full-sort kNN reference: per-row distance vector, lexsort, truncate."""
    n, dim = points.shape
    m = min(k, n - 1)
    indices = np.empty((n, m), dtype=np.int64)
    distances = np.empty((n, m), dtype=np.float64)
    for i in range(n):
        acc = np.zeros(n)
        for f in range(dim):
            diff = points[i, f] - points[:, f]
            acc += diff * diff if metric == "euclidean" else np.abs(diff)
        dist = np.sqrt(acc) if metric == "euclidean" else acc
        dist[i] = np.inf
        order = np.lexsort((np.arange(n), dist))[:m]
        indices[i] = order
        distances[i] = dist[order]
    return indices, distances


def lof_oracle(points: np.ndarray, k: int) -> np.ndarray:
    """Straight-from-definition LOF in pure Python loops."""
    n, dim = points.shape
    dist = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            s = 0.0
            for f in range(dim):
                diff = points[i][f] - points[j][f]
                s += diff * diff
            dist[i][j] = s ** 0.5

    neighborhoods = []
    for i in range(n):
        order = sorted((dist[i][j], j) for j in range(n) if j != i)
        neighborhoods.append([j for _, j in order[:k]])
    k_distance = [dist[i][neighborhoods[i][-1]] for i in range(n)]

    lrd = []
    for i in range(n):
        reach = [max(k_distance[o], dist[i][o]) for o in neighborhoods[i]]
        lrd.append(1.0 / (sum(reach) / len(reach) + 1e-12))
    lof = []
    for i in range(n):
        lof.append(sum(lrd[o] for o in neighborhoods[i]) / len(neighborhoods[i]) / lrd[i])
    return np.asarray(lof)


def auc_oracle(scores: np.ndarray, labels: np.ndarray) -> float:
    """Every positive-negative pair enumerated; ties credit one half."""
    pos = scores[labels == 1]
    neg = scores[labels == 0]
    wins = (pos[:, None] > neg[None, :]).sum()
    ties = (pos[:, None] == neg[None, :]).sum()
    # numerator is a multiple of 0.5 well below 2**53, so this is exact
    return (float(wins) + 0.5 * float(ties)) / (len(pos) * len(neg))


def step_matrix(cng: CommonNeighborGraph, top_k: int) -> np.ndarray:
    """The dense row-stochastic matrix of one averaging step."""
    n = cng.n
    weights = np.zeros((n, n))
    for i in range(n):
        sources = top_in_edges(cng, i, top_k)
        share = 1.0 / (len(sources) + 1)
        weights[i, i] = share
        for j in sources:
            weights[i, j] = share
    return weights
