"""NumPy implementation of the score-averaging kernel.

Kept bit-compatible with the compiled kernel: per-point sums accumulate the
in-edge scores in list order (np.bincount adds weights in appearance order),
then the old score is added and the total divided by (in-degree + 1).
"""

import numpy as np


class PropagationKernel:
    def __init__(self, indptr: np.ndarray, indices: np.ndarray):
        self.indptr = np.ascontiguousarray(indptr, dtype=np.int64)
        self.indices = np.ascontiguousarray(indices, dtype=np.int64)
        n = len(indptr) - 1
        degrees = np.diff(self.indptr)
        self._segments = np.repeat(np.arange(n, dtype=np.int64), degrees)
        self._denom = (degrees + 1).astype(np.float64)
        self.n = n

    def step(self, scores: np.ndarray, out: np.ndarray) -> float:
        """One synchronous averaging update; returns the max absolute change."""
        sums = np.bincount(self._segments, weights=scores[self.indices], minlength=self.n)
        np.divide(scores + sums, self._denom, out=out)
        return float(np.max(np.abs(out - scores))) if self.n else 0.0
