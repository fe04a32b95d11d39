"""Command-line benchmark runner.

Subcommands: ``run`` (one experiment), ``sweep`` (K sweep over one dataset),
``synth`` (materialize a synthetic dataset), ``export-edges`` (outlier kNN
edges for plotting), ``eval-scores`` (AUC of an external score file, no
propagation). Exit codes: 0 success, 1 validation error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from ipof.data import SyntheticConfig, generate_synthetic, write_dataset
from ipof.pipeline import (
    ExperimentSpec,
    SpecValidationError,
    StageError,
    eval_external_scores,
    export_outlier_edges,
    run_k_sweep,
    run_single,
)

__all__ = ["main", "build_parser"]

_DEFAULT_SWEEP = "5,10,20,30,40,50,60,70,80,90,100"


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad usage; the CLI contract wants 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _parse_seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"seed {value} does not fit in 64 unsigned bits")
    return value


def _parse_k_list(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse K list {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("K list is empty")
    return values


def _add_dataset_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--dataset", type=Path, help="comma-delimited dataset file")
    sub.add_argument(
        "--synth",
        nargs="?",
        const="",
        default=None,
        metavar="CONFIG.json",
        help="use the synthetic generator; optional JSON config path",
    )
    sub.add_argument("--label-col", help="header name of the 0/1 label column")
    sub.add_argument("--seed", type=_parse_seed, default=None, help="unsigned 64-bit seed")


def _add_run_flags(sub: argparse.ArgumentParser, k_default: str) -> None:
    sub.add_argument(
        "--detector",
        default="lof",
        help="initial scorer: lof, knnd, or file:<path>",
    )
    sub.add_argument("--detector-k", type=int, default=10, help="detector neighbor count")
    sub.add_argument("--graph-k", type=int, default=None, help="kNN graph k (default n-1)")
    sub.add_argument("--K", default=k_default, help="propagation neighbor count(s)")
    sub.add_argument("--tol", type=float, default=1e-9, help="convergence tolerance")
    sub.add_argument("--max-iters", type=int, default=10000, help="iteration cap")
    sub.add_argument("--normalize", action="store_true", help="min-max scale initial scores")
    sub.add_argument("--trace", action="store_true", help="record and write per-iteration traces")


def _synthetic_from_args(args) -> SyntheticConfig | None:
    if args.synth is None:
        return None
    if args.synth == "":
        return SyntheticConfig()
    try:
        return SyntheticConfig.from_json(args.synth)
    except (OSError, ValueError) as exc:
        raise SpecValidationError(f"bad synthetic config: {exc}") from None


def _spec_from_args(args, k_values: tuple[int, ...]) -> ExperimentSpec:
    return ExperimentSpec(
        dataset_path=args.dataset,
        synthetic=_synthetic_from_args(args),
        label_column=args.label_col,
        detector=args.detector,
        detector_k=args.detector_k,
        graph_k=args.graph_k,
        k_values=k_values,
        tolerance=args.tol,
        max_iterations=args.max_iters,
        normalize=args.normalize,
        record_trace=args.trace,
        seed=args.seed,
        out_dir=args.out,
    )


def _cmd_run(args) -> int:
    k_values = _parse_k_list(args.K) if isinstance(args.K, str) else args.K
    if len(k_values) != 1:
        raise SpecValidationError("run takes a single K; use sweep for a list")
    report = run_single(_spec_from_args(args, k_values))
    print("\n".join(report.report_lines()))
    return 0


def _cmd_sweep(args) -> int:
    k_values = _parse_k_list(args.K) if isinstance(args.K, str) else args.K
    report = run_k_sweep(_spec_from_args(args, k_values))
    print("\n".join(report.report_lines()))
    return 0


def _cmd_synth(args) -> int:
    if args.out is None:
        raise SpecValidationError("synth needs --out")
    config = _synthetic_from_args(args) or SyntheticConfig()
    if args.seed is not None:
        from dataclasses import replace

        config = replace(config, seed=args.seed)
    dataset = generate_synthetic(config)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "synthetic.csv"
    write_dataset(dataset, path)
    print(f"wrote {dataset.n} points to {path}")
    return 0


def _cmd_export_edges(args) -> int:
    spec = ExperimentSpec(
        dataset_path=args.dataset,
        synthetic=_synthetic_from_args(args),
        label_column=args.label_col,
        graph_k=args.graph_k,
        seed=args.seed,
        out_dir=args.out,
    )
    path, count = export_outlier_edges(spec)
    print(f"wrote {count} outlier edges to {path}")
    return 0


def _cmd_eval_scores(args) -> int:
    spec = ExperimentSpec(
        dataset_path=args.dataset,
        synthetic=_synthetic_from_args(args),
        label_column=args.label_col,
        detector=args.detector,
        normalize=args.normalize,
        seed=args.seed,
        out_dir=args.out,
    )
    report = eval_external_scores(spec)
    print("\n".join(report.report_lines()))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ipof", description=__doc__)
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="one dataset, one detector, one K")
    _add_dataset_flags(run)
    _add_run_flags(run, k_default="10")
    run.add_argument("--out", type=Path, default=None, help="report output directory")
    run.set_defaults(func=_cmd_run)

    sweep = commands.add_parser("sweep", help="one dataset swept over several K")
    _add_dataset_flags(sweep)
    _add_run_flags(sweep, k_default=_DEFAULT_SWEEP)
    sweep.add_argument("--out", type=Path, default=None, help="report output directory")
    sweep.set_defaults(func=_cmd_sweep)

    synth = commands.add_parser("synth", help="write a synthetic dataset file")
    _add_dataset_flags(synth)
    synth.add_argument("--out", type=Path, default=None, help="output directory")
    synth.set_defaults(func=_cmd_synth)

    export = commands.add_parser("export-edges", help="dump outlier kNN edges")
    _add_dataset_flags(export)
    export.add_argument("--graph-k", type=int, default=None, help="kNN graph k (default n-1)")
    export.add_argument("--out", type=Path, default=None, help="output directory")
    export.set_defaults(func=_cmd_export_edges)

    evals = commands.add_parser("eval-scores", help="AUC of an external score file")
    _add_dataset_flags(evals)
    evals.add_argument("--detector", required=True, help="file:<path> score source")
    evals.add_argument("--normalize", action="store_true", help="min-max scale the scores")
    evals.add_argument("--out", type=Path, default=None, help="report output directory")
    evals.set_defaults(func=_cmd_eval_scores)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SpecValidationError as exc:
        print(f"ipof: validation error: {exc}", file=sys.stderr)
        return 1
    except StageError as exc:
        print(f"ipof: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary, map to exit code
        print(f"ipof: unexpected error: {exc}", file=sys.stderr)
        return 2
