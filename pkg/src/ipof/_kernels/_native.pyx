# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled score-averaging kernel over a frozen CSR in-edge graph.

Arithmetic matches the NumPy fallback bit for bit: in-edge scores are summed
in list order, the old score added last, and the total divided by
(in-degree + 1).
"""

from libc.math cimport fabs

import numpy as np


cdef class PropagationKernel:
    cdef long long[::1] indptr
    cdef long long[::1] indices
    cdef public Py_ssize_t n

    def __init__(self, indptr, indices):
        self.indptr = np.ascontiguousarray(indptr, dtype=np.int64)
        self.indices = np.ascontiguousarray(indices, dtype=np.int64)
        self.n = len(indptr) - 1

    def step(self, scores, out):
        """One synchronous averaging update; returns the max absolute change."""
        cdef double[::1] s = scores
        cdef double[::1] o = out
        cdef Py_ssize_t i
        cdef long long p, lo, hi
        cdef double acc, value, delta, max_delta = 0.0
        for i in range(self.n):
            lo = self.indptr[i]
            hi = self.indptr[i + 1]
            acc = 0.0
            for p in range(lo, hi):
                acc += s[self.indices[p]]
            value = (s[i] + acc) / <double>(hi - lo + 1)
            o[i] = value
            delta = fabs(value - s[i])
            if delta > max_delta:
                max_delta = delta
        return max_delta
