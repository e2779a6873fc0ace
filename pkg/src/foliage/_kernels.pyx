# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled pointwise kernels for fibre-valued grid sections."""

from libc.stdlib cimport malloc, free

import numpy as np


def matvec_accumulate(Ms, const long long[::1] idx, us, double complex[:, ::1] out):
    """out[i] += sum_k Ms[k][idx[i]] @ us[k][i] for every grid point i.

    ``Ms[k]`` are C-contiguous ``(m, d, d)`` complex arrays and ``us[k]``
    C-contiguous ``(n, d)``.  All K terms are accumulated in one pass over
    the grid, so each output vector is written once.
    """
    cdef Py_ssize_t K = len(Ms)
    cdef Py_ssize_t n = out.shape[0]
    cdef Py_ssize_t d = out.shape[1]
    cdef Py_ssize_t i, a, b, t
    cdef long long k
    cdef double complex s
    cdef const double complex* mrow
    cdef const double complex* urow
    cdef const double complex[:, :, ::1] mv
    cdef const double complex[:, ::1] uv
    if len(us) != K:
        raise ValueError("Ms and us must have the same length")
    if idx.shape[0] != n:
        raise ValueError("index map has the wrong length")
    if K == 0:
        return
    cdef const double complex** mp = <const double complex**> malloc(K * sizeof(void*))
    cdef const double complex** up = <const double complex**> malloc(K * sizeof(void*))
    try:
        for t in range(K):
            mv = Ms[t]
            uv = us[t]
            if mv.shape[1] != d or mv.shape[2] != d or uv.shape[0] != n or uv.shape[1] != d:
                raise ValueError("shape mismatch in matvec_accumulate")
            mp[t] = &mv[0, 0, 0]
            up[t] = &uv[0, 0]
        with nogil:
            for i in range(n):
                k = idx[i]
                for a in range(d):
                    s = out[i, a]
                    for t in range(K):
                        mrow = mp[t] + (k * d + a) * d
                        urow = up[t] + i * d
                        for b in range(d):
                            s = s + mrow[b] * urow[b]
                    out[i, a] = s
    finally:
        free(mp)
        free(up)
