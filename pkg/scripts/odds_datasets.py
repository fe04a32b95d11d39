"""Reference list of the 17 ODDS benchmark datasets this package evaluates on.

The ODDS library (https://odds.cs.stonybrook.edu) distributes these as .mat
files whose redistribution is not ours to grant, so nothing is downloaded
here. This script prints the expected shapes, converts user-fetched .mat
files to the CSV layout the CLI reads, and verifies converted files.

    python3 scripts/odds_datasets.py                    # print the table
    python3 scripts/odds_datasets.py --convert DIR      # .mat -> .csv in DIR
    python3 scripts/odds_datasets.py --verify DIR       # check DIR/<name>.csv

Shapes are the reference benchmark's preprocessing; a few ODDS exports have
been revised since (e.g. subsampled variants), so treat mismatches reported
by --verify as a preprocessing difference, not corruption.
"""

import argparse
import sys
from pathlib import Path

# name -> (rows, feature columns, outliers)
DATASETS = {
    "arrhythmia": (452, 274, 66),
    "breastw": (683, 9, 239),
    "cardio": (1831, 21, 176),
    "glass": (214, 9, 9),
    "ionosphere": (351, 33, 126),
    "mammography": (11183, 6, 260),
    "mnist": (7603, 100, 700),
    "optdigits": (5126, 64, 150),
    "pendigits": (6870, 16, 156),
    "pima": (768, 8, 268),
    "satellite": (6435, 36, 2036),
    "satimage-2": (214, 9, 9),
    "shuttle": (4909, 9, 351),
    "speech": (3686, 400, 61),
    "vertebral": (240, 6, 30),
    "vowels": (1456, 12, 50),
    "wine": (129, 13, 10),
}


def print_table() -> None:
    print(f"{'dataset':<12} {'rows':>6} {'dims':>5} {'outliers':>9} {'ratio':>7}")
    for name, (rows, dims, outliers) in DATASETS.items():
        print(f"{name:<12} {rows:>6} {dims:>5} {outliers:>9} {outliers / rows:>6.1%}")


def convert(directory: Path) -> int:
    try:
        from scipy.io import loadmat
    except ImportError:
        print("--convert needs scipy (pip install scipy)", file=sys.stderr)
        return 1
    import numpy as np

    from ipof.data import Dataset, write_dataset

    converted = 0
    for name in DATASETS:
        mat_path = directory / f"{name}.mat"
        if not mat_path.is_file():
            continue
        blob = loadmat(mat_path)
        points = np.asarray(blob["X"], dtype=np.float64)
        labels = np.asarray(blob["y"]).ravel().astype(np.int64)
        csv_path = directory / f"{name}.csv"
        write_dataset(Dataset(points=points, labels=labels), csv_path)
        print(f"wrote {csv_path} ({points.shape[0]}x{points.shape[1]})")
        converted += 1
    if not converted:
        print(f"no <name>.mat files found in {directory}", file=sys.stderr)
        return 1
    return 0


def verify(directory: Path) -> int:
    from ipof.data import load_dataset

    problems = 0
    for name, (rows, dims, outliers) in DATASETS.items():
        csv_path = directory / f"{name}.csv"
        if not csv_path.is_file():
            print(f"{name:<12} missing")
            continue
        try:
            d = load_dataset(csv_path, label_column="label")
        except ValueError as exc:
            print(f"{name:<12} unreadable: {exc}")
            problems += 1
            continue
        got = (d.n, d.dim, int(d.labels.sum()))
        if got == (rows, dims, outliers):
            print(f"{name:<12} ok ({d.n}x{d.dim}, {got[2]} outliers)")
        else:
            print(f"{name:<12} shape {got} != expected {(rows, dims, outliers)}")
            problems += 1
    return 1 if problems else 0


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--convert", type=Path, metavar="DIR", help="convert DIR/<name>.mat files")
    group.add_argument("--verify", type=Path, metavar="DIR", help="verify DIR/<name>.csv files")
    args = parser.parse_args()
    if args.convert:
        return convert(args.convert)
    if args.verify:
        return verify(args.verify)
    print_table()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
