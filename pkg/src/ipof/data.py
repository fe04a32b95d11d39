"""Dataset container, delimited-text ingestion, and the synthetic cluster generator."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "Dataset",
    "SyntheticConfig",
    "load_dataset",
    "write_dataset",
    "generate_synthetic",
]


@dataclass(frozen=True)
class Dataset:
    """n points with d real-valued features plus optional binary outlier labels.

    ``labels`` uses 0 for inliers and 1 for outliers. Points must be finite;
    the instance is immutable after construction and safe to share.
    """

    points: np.ndarray
    labels: np.ndarray | None = None
    name: str = "dataset"

    def __post_init__(self):
        points = np.ascontiguousarray(np.asarray(self.points, dtype=np.float64))
        if points.ndim != 2:
            raise ValueError(f"points must be a 2-D array, got shape {points.shape}")
        n, d = points.shape
        if n < 2:
            raise ValueError(f"need at least 2 points, got {n}")
        if d < 1:
            raise ValueError("need at least 1 feature")
        if not np.all(np.isfinite(points)):
            i, j = np.argwhere(~np.isfinite(points))[0]
            raise ValueError(f"non-finite feature value at point {i}, feature {j}")
        object.__setattr__(self, "points", points)
        if self.labels is not None:
            labels = np.asarray(self.labels, dtype=np.int64)
            if labels.shape != (n,):
                raise ValueError(
                    f"labels length {labels.shape} does not match {n} points"
                )
            if not np.all((labels == 0) | (labels == 1)):
                bad = int(np.flatnonzero((labels != 0) & (labels != 1))[0])
                raise ValueError(f"label at point {bad} is not 0 or 1")
            object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class SyntheticConfig:
    """Parameters for the Gaussian-clusters-plus-scattered-outliers generator."""

    cluster_count: int = 3
    points_per_cluster: int = 500
    outlier_count: int = 150
    dimension: int = 2
    cluster_spreads: tuple[float, ...] = (0.5, 1.0, 2.0)
    seed: int = 0

    def __post_init__(self):
        if self.cluster_count < 1:
            raise ValueError("cluster_count must be positive")
        if self.points_per_cluster < 1:
            raise ValueError("points_per_cluster must be positive")
        if self.outlier_count < 0:
            raise ValueError("outlier_count must be non-negative")
        if self.dimension < 1:
            raise ValueError("dimension must be positive")
        spreads = tuple(float(s) for s in self.cluster_spreads)
        if len(spreads) != self.cluster_count:
            raise ValueError(
                f"need one spread per cluster: got {len(spreads)} spreads "
                f"for {self.cluster_count} clusters"
            )
        if any(s <= 0 for s in spreads):
            raise ValueError("all cluster spreads must be > 0")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in an unsigned 64-bit integer")
        object.__setattr__(self, "cluster_spreads", spreads)

    @classmethod
    def from_json(cls, path: str | Path) -> "SyntheticConfig":
        """Read a config from a JSON object keyed by the field names."""
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
        if not isinstance(raw, dict):
            raise ValueError(f"{path}: expected a JSON object")
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"{path}: unknown config keys {sorted(unknown)}")
        return cls(**raw)


def _parse_cell(token: str, row: int, col: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ValueError(f"row {row}, column {col}: cannot parse {token!r} as a number") from None
    if not np.isfinite(value):
        raise ValueError(f"row {row}, column {col}: non-finite value {token!r}")
    return value


def _looks_numeric(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return False
    return True


def load_dataset(path: str | Path, label_column: str | None = None) -> Dataset:
    """Load a comma-delimited numeric text file as a Dataset.

    The file may start with a single header row (detected when any first-row
    token is non-numeric). ``label_column`` names a header column holding
    0/1 outlier labels; it is removed from the features. Errors carry the
    offending row/column. Row numbers in messages are 1-based file lines.
    """
    path = Path(path)
    with open(path, "r", encoding="utf-8") as fh:
        lines = [line.rstrip("\n").rstrip("\r") for line in fh]
    rows = [(i + 1, line.split(",")) for i, line in enumerate(lines) if line.strip()]
    if not rows:
        raise ValueError(f"{path}: file is empty")

    header: list[str] | None = None
    first_tokens = [t.strip() for t in rows[0][1]]
    if any(not _looks_numeric(t) for t in first_tokens):
        header = first_tokens
        rows = rows[1:]

    if label_column is not None:
        if header is None:
            raise ValueError(f"{path}: no header row, cannot locate label column {label_column!r}")
        if label_column not in header:
            raise ValueError(f"{path}: label column {label_column!r} not in header {header}")
        label_idx = header.index(label_column)
    else:
        label_idx = None

    if len(rows) < 2:
        raise ValueError(f"{path}: need at least 2 data rows, got {len(rows)}")

    width = len(rows[0][1])
    data = np.empty((len(rows), width), dtype=np.float64)
    for out_i, (lineno, tokens) in enumerate(rows):
        if len(tokens) != width:
            raise ValueError(
                f"{path}: row {lineno} has {len(tokens)} fields, expected {width}"
            )
        for j, token in enumerate(tokens):
            data[out_i, j] = _parse_cell(token.strip(), lineno, j)

    labels = None
    if label_idx is not None:
        raw_labels = data[:, label_idx]
        if not np.all((raw_labels == 0.0) | (raw_labels == 1.0)):
            bad = int(np.flatnonzero((raw_labels != 0.0) & (raw_labels != 1.0))[0])
            raise ValueError(
                f"{path}: row {rows[bad][0]} label value {raw_labels[bad]!r} is not 0 or 1"
            )
        labels = raw_labels.astype(np.int64)
        data = np.delete(data, label_idx, axis=1)

    return Dataset(points=data, labels=labels, name=path.stem)


def write_dataset(dataset: Dataset, path: str | Path) -> None:
    """Write the canonical comma-delimited form: header, one point per row.

    Feature values are printed with ``repr`` so a reload round-trips exactly.
    Labels, when present, become a final ``label`` column with values 0/1.
    """
    path = Path(path)
    cols = [f"f{j}" for j in range(dataset.dim)]
    if dataset.labels is not None:
        cols.append("label")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(cols) + "\n")
        for i in range(dataset.n):
            fields = [repr(float(v)) for v in dataset.points[i]]
            if dataset.labels is not None:
                fields.append(str(int(dataset.labels[i])))
            fh.write(",".join(fields) + "\n")


def _cluster_centers(config: SyntheticConfig) -> np.ndarray:
    # Fixed centers on a regular polygon in the first two axes (line when only
    # one axis exists). The 30x-max-spread gap keeps every pairwise distance
    # far above the 10x separation floor while leaving the outlier box roomy,
    # so scattered outliers read as locally plausible to a density detector.
    separation = 30.0 * max(config.cluster_spreads)
    m = config.cluster_count
    centers = np.zeros((m, config.dimension))
    if m == 1:
        return centers
    if config.dimension == 1 or m == 2:
        centers[:, 0] = separation * np.arange(m)
        return centers
    radius = separation / (2.0 * np.sin(np.pi / m))
    angles = 2.0 * np.pi * np.arange(m) / m
    centers[:, 0] = radius * np.cos(angles)
    centers[:, 1] = radius * np.sin(angles)
    return centers


def generate_synthetic(config: SyntheticConfig) -> Dataset:
    """Sample Gaussian clusters plus uniformly scattered outliers, deterministically.

    Inliers (label 0) are drawn from isotropic Gaussians at fixed well-separated
    centers with the per-cluster spreads. Outliers (label 1) are drawn uniformly
    over the bounding box of the centers inflated by 6x the widest spread and
    rejected while they fall within 3 spreads of any center. The whole sample,
    including the final shuffle, is a pure function of ``config``.
    """
    rng = np.random.default_rng(config.seed)
    centers = _cluster_centers(config)
    spreads = np.asarray(config.cluster_spreads)

    inliers = np.concatenate(
        [
            center + spread * rng.standard_normal((config.points_per_cluster, config.dimension))
            for center, spread in zip(centers, spreads)
        ]
    )

    max_spread = float(spreads.max())
    lo = centers.min(axis=0) - 6.0 * max_spread
    hi = centers.max(axis=0) + 6.0 * max_spread

    outliers = np.empty((config.outlier_count, config.dimension))
    accepted = 0
    attempts = 0
    budget = 1000 * max(config.outlier_count, 1)
    while accepted < config.outlier_count:
        want = config.outlier_count - accepted
        batch = max(want * 2, 64)
        if attempts + batch > budget:
            batch = budget - attempts
            if batch <= 0:
                raise RuntimeError(
                    "outlier rejection sampling exhausted its attempt budget; "
                    "the config leaves too little room outside the clusters"
                )
        attempts += batch
        cand = rng.uniform(lo, hi, size=(batch, config.dimension))
        dists = np.linalg.norm(cand[:, None, :] - centers[None, :, :], axis=2)
        keep = cand[np.all(dists > 3.0 * spreads[None, :], axis=1)][:want]
        outliers[accepted : accepted + len(keep)] = keep
        accepted += len(keep)

    points = np.concatenate([inliers, outliers])
    labels = np.concatenate(
        [
            np.zeros(config.cluster_count * config.points_per_cluster, dtype=np.int64),
            np.ones(config.outlier_count, dtype=np.int64),
        ]
    )
    perm = rng.permutation(len(points))
    return Dataset(points=points[perm], labels=labels[perm], name="synthetic")
