"""End-to-end experiment runs: dataset, detector, graph, propagation, report files.

A run is described by an :class:`ExperimentSpec`, validated before any
computation, then executed stage by stage. Failures inside a stage surface as
:class:`StageError` naming the stage. Report rows are byte-deterministic for a
fixed spec and seed; wall-clock metadata lives only in the JSON sidecar so the
CSV stays diffable.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from ipof.data import Dataset, SyntheticConfig, generate_synthetic, load_dataset
from ipof.detectors import (
    ScoreVector,
    knn_distance_scores,
    load_scores,
    lof_scores,
    minmax_normalize,
)
from ipof.evaluation import auc, improvement, report_header, report_row
from ipof.graphs import build_common_neighbors, build_knn, write_edges
from ipof.propagation import (
    PropagationConfig,
    PropagationTrace,
    backend_name,
    propagate,
    write_snapshots,
    write_trace,
)

__all__ = [
    "ExperimentSpec",
    "ExperimentResult",
    "BenchmarkReport",
    "SpecValidationError",
    "StageError",
    "run_single",
    "run_k_sweep",
    "export_outlier_edges",
    "eval_external_scores",
]


class SpecValidationError(ValueError):
    """A spec problem detectable before any computation starts."""


class StageError(RuntimeError):
    """A failure inside a named pipeline stage."""

    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause


def _parse_detector(detector: str) -> tuple[str, Path | None]:
    if detector in ("lof", "knnd"):
        return detector, None
    if detector.startswith("file:") and len(detector) > len("file:"):
        return "file", Path(detector[len("file:"):])
    raise SpecValidationError(
        f"unknown detector {detector!r}; expected lof, knnd, or file:<path>"
    )


@dataclass(frozen=True)
class ExperimentSpec:
    """One experiment (or one K-sweep) ready to execute.

    Exactly one of ``dataset_path`` / ``synthetic`` must be set. ``graph_k``
    of None means n-1, the full common-neighbor graph. ``seed`` overrides the
    synthetic config's own seed when given; it has no effect on file datasets.
    """

    dataset_path: Path | None = None
    synthetic: SyntheticConfig | None = None
    label_column: str | None = None
    detector: str = "lof"
    detector_k: int = 10
    graph_k: int | None = None
    k_values: tuple[int, ...] = (10,)
    tolerance: float = 1e-9
    max_iterations: int = 10000
    normalize: bool = False
    record_trace: bool = False
    seed: int | None = None
    out_dir: Path | None = None

    def validate(self) -> None:
        """Raise SpecValidationError on any problem visible without computing."""
        if (self.dataset_path is None) == (self.synthetic is None):
            raise SpecValidationError(
                "exactly one dataset source required: a dataset file or a synthetic config"
            )
        if self.dataset_path is not None and not Path(self.dataset_path).is_file():
            raise SpecValidationError(f"dataset file not found: {self.dataset_path}")
        kind, score_path = _parse_detector(self.detector)
        if kind == "file" and not score_path.is_file():
            raise SpecValidationError(f"score file not found: {score_path}")
        if kind != "file" and self.detector_k < 1:
            raise SpecValidationError(f"detector_k must be >= 1, got {self.detector_k}")
        if not self.k_values:
            raise SpecValidationError("K list must not be empty")
        if any(k < 1 for k in self.k_values):
            raise SpecValidationError(f"every K must be >= 1, got {list(self.k_values)}")
        if self.graph_k is not None and self.graph_k < 1:
            raise SpecValidationError(f"graph_k must be >= 1, got {self.graph_k}")
        try:
            PropagationConfig(
                tolerance=self.tolerance, max_iterations=self.max_iterations
            )
        except ValueError as exc:
            raise SpecValidationError(str(exc)) from None

    def dataset_name(self) -> str:
        if self.dataset_path is not None:
            return Path(self.dataset_path).stem
        return "synthetic"


@dataclass(frozen=True)
class ExperimentResult:
    """One report row plus the artifacts behind it."""

    dataset: str
    detector: str
    top_k: int | None
    auc_initial: float | None
    auc_final: float | None
    improvement_pct: float | None
    iterations: int | None
    converged: bool | None
    final_scores: ScoreVector | None = None
    trace: PropagationTrace | None = None

    def row(self) -> str:
        return report_row(
            self.dataset,
            self.detector,
            self.top_k,
            self.auc_initial,
            self.auc_final,
            self.improvement_pct,
            self.iterations,
            self.converged,
        )


@dataclass(frozen=True)
class BenchmarkReport:
    """Results of one invocation: rows, trace summaries, and run metadata."""

    results: tuple[ExperimentResult, ...]
    metadata: dict = field(default_factory=dict)

    def report_lines(self) -> list[str]:
        return [report_header()] + [r.row() for r in self.results]

    def write(self, out_dir: str | Path) -> dict[str, Path]:
        """Write report.csv, meta.json, and any recorded traces; return paths."""
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        paths: dict[str, Path] = {}

        report_path = out_dir / "report.csv"
        with open(report_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(self.report_lines()) + "\n")
        paths["report"] = report_path

        meta_path = out_dir / "meta.json"
        with open(meta_path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(self.metadata, fh, indent=2, sort_keys=True)
            fh.write("\n")
        paths["meta"] = meta_path

        traced = [r for r in self.results if r.trace is not None and r.trace.snapshots]
        for result in traced:
            suffix = f"_K{result.top_k}" if len(traced) > 1 else ""
            trace_path = out_dir / f"trace{suffix}.csv"
            write_trace(result.trace, trace_path)
            paths[f"trace{suffix}"] = trace_path
            snap_path = out_dir / f"snapshots{suffix}.csv"
            write_snapshots(result.trace, snap_path)
            paths[f"snapshots{suffix}"] = snap_path
        return paths


def _load_stage(spec: ExperimentSpec) -> Dataset:
    if spec.dataset_path is not None:
        return load_dataset(spec.dataset_path, spec.label_column)
    config = spec.synthetic if spec.synthetic is not None else SyntheticConfig()
    if spec.seed is not None:
        config = replace(config, seed=spec.seed)
    return generate_synthetic(config)


def _detect_stage(spec: ExperimentSpec, dataset: Dataset) -> ScoreVector:
    kind, score_path = _parse_detector(spec.detector)
    if kind == "lof":
        scores = lof_scores(dataset, spec.detector_k)
    elif kind == "knnd":
        scores = knn_distance_scores(dataset, spec.detector_k)
    else:
        scores = load_scores(score_path, dataset.n)
    if spec.normalize:
        scores = minmax_normalize(scores)
    return scores


class _Clock:
    """Stage runner collecting per-stage wall times and naming failures."""

    def __init__(self):
        self.entries: list[dict] = []

    def run(self, stage: str, fn, **context):
        start = time.perf_counter()
        try:
            value = fn()
        except SpecValidationError:
            raise
        except StageError:
            raise
        except Exception as exc:
            raise StageError(stage, exc) from exc
        entry = {"stage": stage, "seconds": round(time.perf_counter() - start, 6)}
        entry.update(context)
        self.entries.append(entry)
        return value


def _metadata(spec: ExperimentSpec, clock: _Clock, extra: dict) -> dict:
    from ipof import __version__

    meta = {
        "version": __version__,
        "backend": backend_name(),
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "seed": spec.seed,
        "dataset": spec.dataset_name(),
        "detector": spec.detector,
        "stages": clock.entries,
    }
    meta.update(extra)
    return meta


def _execute(spec: ExperimentSpec) -> BenchmarkReport:
    spec.validate()
    clock = _Clock()

    dataset = clock.run("dataset", lambda: _load_stage(spec))
    initial = clock.run("detector", lambda: _detect_stage(spec, dataset))

    graph_k = spec.graph_k if spec.graph_k is not None else dataset.n - 1

    def _build():
        return build_common_neighbors(build_knn(dataset, graph_k))

    cng = clock.run("graph", _build, graph_k=graph_k)

    auc_initial = None
    if dataset.labels is not None:
        auc_initial = clock.run("evaluate", lambda: auc(initial.scores, dataset.labels))

    results = []
    trace_summaries = []
    for top_k in spec.k_values:
        config = PropagationConfig(
            top_k=top_k,
            tolerance=spec.tolerance,
            max_iterations=spec.max_iterations,
            record_trace=spec.record_trace,
        )
        final, trace = clock.run(
            "propagate", lambda: propagate(initial, cng, config), K=top_k
        )
        auc_final = None
        improvement_pct = None
        if dataset.labels is not None:
            auc_final = auc(final.scores, dataset.labels)
            if auc_initial > 0:
                improvement_pct = improvement(auc_initial, auc_final)
        results.append(
            ExperimentResult(
                dataset=spec.dataset_name(),
                detector=initial.source,
                top_k=top_k,
                auc_initial=auc_initial,
                auc_final=auc_final,
                improvement_pct=improvement_pct,
                iterations=trace.iterations_run,
                converged=trace.converged,
                final_scores=final,
                trace=trace if spec.record_trace else None,
            )
        )
        trace_summaries.append(
            {
                "K": top_k,
                "iterations": trace.iterations_run,
                "converged": trace.converged,
                "final_delta": float(trace.step_deltas[-1]) if len(trace.step_deltas) else 0.0,
            }
        )

    metadata = _metadata(
        spec,
        clock,
        {"n": dataset.n, "dim": dataset.dim, "graph_k": graph_k, "traces": trace_summaries},
    )
    report = BenchmarkReport(results=tuple(results), metadata=metadata)
    if spec.out_dir is not None:
        report.write(spec.out_dir)
    return report


def run_single(spec: ExperimentSpec) -> BenchmarkReport:
    """Execute one experiment; the spec must carry exactly one K."""
    if len(spec.k_values) != 1:
        raise SpecValidationError(
            f"run_single needs exactly one K, got {list(spec.k_values)}"
        )
    return _execute(spec)


def run_k_sweep(spec: ExperimentSpec) -> BenchmarkReport:
    """Execute one experiment per K, reusing the dataset, scores, and graph.

    The dataset is loaded once, the detector runs once, and the neighbor graph
    is built once no matter how many K values are swept; the stage timing list
    in the metadata reflects that.
    """
    return _execute(spec)


def export_outlier_edges(spec: ExperimentSpec) -> tuple[Path, int]:
    """Write the kNN edges whose source is a labeled outlier; return (path, count)."""
    spec.validate()
    if spec.out_dir is None:
        raise SpecValidationError("export needs an output directory")
    clock = _Clock()
    dataset = clock.run("dataset", lambda: _load_stage(spec))
    if dataset.labels is None:
        raise SpecValidationError("edge export needs a labeled dataset")
    graph_k = spec.graph_k if spec.graph_k is not None else dataset.n - 1
    graph = clock.run("graph", lambda: build_knn(dataset, graph_k), graph_k=graph_k)
    out_dir = Path(spec.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "edges.csv"
    sources = np.flatnonzero(dataset.labels == 1)
    count = clock.run("export", lambda: write_edges(graph, path, sources=sources))
    return path, count


def eval_external_scores(spec: ExperimentSpec) -> BenchmarkReport:
    """Score an external file against dataset labels, with no propagation.

    The AUC lands in the ``auc_initial`` column; propagation-specific fields
    stay empty. The detector must be of ``file:<path>`` form and the dataset
    must be labeled.
    """
    spec.validate()
    kind, _ = _parse_detector(spec.detector)
    if kind != "file":
        raise SpecValidationError("eval-scores needs a file:<path> detector")
    clock = _Clock()
    dataset = clock.run("dataset", lambda: _load_stage(spec))
    if dataset.labels is None:
        raise SpecValidationError("eval-scores needs a labeled dataset")
    scores = clock.run("detector", lambda: _detect_stage(spec, dataset))
    value = clock.run("evaluate", lambda: auc(scores.scores, dataset.labels))
    result = ExperimentResult(
        dataset=spec.dataset_name(),
        detector=scores.source,
        top_k=None,
        auc_initial=value,
        auc_final=None,
        improvement_pct=None,
        iterations=None,
        converged=None,
        final_scores=scores,
    )
    metadata = _metadata(spec, clock, {"n": dataset.n, "dim": dataset.dim})
    report = BenchmarkReport(results=(result,), metadata=metadata)
    if spec.out_dir is not None:
        report.write(spec.out_dir)
    return report
