# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled trajectory-stepping kernel.

Semantics must match _kernels_py exactly: the next state is the insertion
point of the uniform in the cumulative row (first index with cum > u)."""

import numpy as np

cimport cython


def run_chunk(double[:, ::1] cum, int state, double[::1] u, int[::1] out):
    """Advance the chain through len(u) steps, writing states into out.

    cum holds cumulative row sums with cum[x, n-1] >= 1. Returns the final
    state so chunks can be chained.
    """
    cdef Py_ssize_t n = cum.shape[1]
    cdef Py_ssize_t m = u.shape[0]
    cdef Py_ssize_t i, j
    cdef int st = state
    cdef double x
    with nogil:
        for i in range(m):
            x = u[i]
            j = 0
            while j < n - 1 and cum[st, j] <= x:
                j += 1
            st = <int> j
            out[i] = st
    return st
