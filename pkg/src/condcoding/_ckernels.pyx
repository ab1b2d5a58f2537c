# cython: language_level=3
"""Compiled inner loops. Mirrors ``_pykernels`` function for function."""
import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, log2

cnp.import_array()

# Below this a probability is an exact zero for log purposes.
cdef double TINY = 1e-300


def compensated_sum(const double[::1] a):
    """Neumaier-compensated sum of a contiguous float64 vector."""
    cdef Py_ssize_t i, n = a.shape[0]
    cdef double s = 0.0, c = 0.0, t, x
    for i in range(n):
        x = a[i]
        t = s + x
        if fabs(s) >= fabs(x):
            c += (s - t) + x
        else:
            c += (x - t) + s
        s = t
    return s + c


def entropy_bits(const double[::1] p):
    """-sum p log2 p with 0 log 0 = 0, compensated accumulation."""
    cdef Py_ssize_t i, n = p.shape[0]
    cdef double s = 0.0, c = 0.0, t, x, v
    for i in range(n):
        v = p[i]
        if v <= TINY:
            continue
        x = -v * log2(v)
        t = s + x
        if fabs(s) >= fabs(x):
            c += (s - t) + x
        else:
            c += (x - t) + s
        s = t
    return s + c


def shear_residual(const double[:, ::1] joint):
    """Map a (row, col) joint onto (row - col, col).

    Output row ``k`` holds difference ``k - (ncol - 1)`` relative to the input
    offsets. The map is injective so no accumulation is needed.
    """
    cdef Py_ssize_t nrow = joint.shape[0], ncol = joint.shape[1]
    cdef Py_ssize_t i, j
    out = np.zeros((nrow + ncol - 1, ncol), dtype=np.float64)
    cdef double[:, ::1] o = out
    for i in range(nrow):
        for j in range(ncol):
            o[i - j + ncol - 1, j] = joint[i, j]
    return out


def count_pairs(const cnp.int64_t[::1] a, const cnp.int64_t[::1] b,
                Py_ssize_t na, Py_ssize_t nb):
    """2-D histogram of index pairs; indices must lie in [0, na) x [0, nb)."""
    cdef Py_ssize_t i, n = a.shape[0]
    cdef cnp.int64_t ia, ib
    if b.shape[0] != n:
        raise ValueError("index arrays differ in length")
    out = np.zeros((na, nb), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] o = out
    for i in range(n):
        ia = a[i]
        ib = b[i]
        if ia < 0 or ia >= na or ib < 0 or ib >= nb:
            raise ValueError(f"pair index ({ia}, {ib}) out of range")
        o[ia, ib] += 1
    return out
