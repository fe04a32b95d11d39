"""Rank-based ROC-AUC and improvement statistics, plus the report row format."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["EvalReport", "auc", "improvement", "report_header", "report_row"]


@dataclass(frozen=True)
class EvalReport:
    """AUC of one score vector against ground truth, with class counts."""

    auc: float
    n_pos: int
    n_neg: int
    detector: str
    top_k: int | None = None
    improvement_pct: float | None = None

    def __post_init__(self):
        if not 0.0 <= self.auc <= 1.0:
            raise ValueError(f"auc {self.auc} outside [0, 1]")
        if self.n_pos < 1 or self.n_neg < 1:
            raise ValueError("need at least one positive and one negative label")


def _midranks(values: np.ndarray) -> np.ndarray:
    """1-based ranks with ties sharing the mean rank of their block."""
    order = np.argsort(values, kind="stable")
    sorted_vals = values[order]
    edges = np.flatnonzero(np.r_[True, sorted_vals[1:] != sorted_vals[:-1], True])
    sizes = np.diff(edges)
    # block occupying positions [b, e) gets rank (b + e - 1)/2 + 1; exact in
    # float64 since both bounds are small integers
    block_rank = (edges[:-1] + edges[1:] - 1) / 2.0 + 1.0
    ranks = np.empty(len(values))
    ranks[order] = np.repeat(block_rank, sizes)
    return ranks


def auc(scores: np.ndarray, labels: np.ndarray) -> float:
    """Probability a random positive outranks a random negative; ties count half.

    Computed from the rank-sum statistic in O(n log n):
    (rank_sum(positives) - n_pos(n_pos+1)/2) / (n_pos * n_neg).
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.shape != labels.shape or scores.ndim != 1:
        raise ValueError(
            f"scores shape {scores.shape} and labels shape {labels.shape} must be equal 1-D"
        )
    if not np.all((labels == 0) | (labels == 1)):
        raise ValueError("labels must be 0 or 1")
    n_pos = int((labels == 1).sum())
    n_neg = int((labels == 0).sum())
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC undefined: need at least one positive and one negative label")
    ranks = _midranks(scores)
    rank_sum = ranks[labels == 1].sum()
    return float((rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def improvement(before: float, after: float) -> float:
    """Relative change in percent, 100 * (after - before) / before."""
    if not before > 0:
        raise ValueError(f"baseline must be > 0, got {before}")
    return float(100.0 * (after - before) / before)


_COLUMNS = (
    "dataset",
    "detector",
    "K",
    "auc_initial",
    "auc_final",
    "improvement_pct",
    "iterations",
    "converged",
)


def report_header() -> str:
    return ",".join(_COLUMNS)


def report_row(
    dataset: str,
    detector: str,
    top_k: int | None,
    auc_initial: float | None,
    auc_final: float | None,
    improvement_pct: float | None,
    iterations: int | None,
    converged: bool | None,
) -> str:
    """One experiment as a comma-delimited line; absent fields stay empty."""

    def fmt(value) -> str:
        if value is None:
            return ""
        if isinstance(value, bool):
            return "true" if value else "false"
        if isinstance(value, float):
            return repr(float(value))
        return str(value)

    return ",".join(
        fmt(v)
        for v in (
            dataset,
            detector,
            top_k,
            auc_initial,
            auc_final,
            improvement_pct,
            iterations,
            converged,
        )
    )
