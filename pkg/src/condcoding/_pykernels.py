"""Pure-Python reference versions of the hot kernels.

Used when the compiled extension is unavailable, and as the cross-check for
it in the test-suite.
"""
import math

import numpy as np

TINY = 1e-300


def compensated_sum(a):
    return math.fsum(np.asarray(a, dtype=np.float64).ravel().tolist())


def entropy_bits(p):
    p = np.asarray(p, dtype=np.float64).ravel()
    p = p[p > TINY]
    if p.size == 0:
        return 0.0
    return math.fsum((-p * np.log2(p)).tolist())


def shear_residual(joint):
    joint = np.asarray(joint, dtype=np.float64)
    nrow, ncol = joint.shape
    out = np.zeros((nrow + ncol - 1, ncol), dtype=np.float64)
    i, j = np.indices((nrow, ncol))
    out[i - j + ncol - 1, j] = joint
    return out


def count_pairs(a, b, na, nb):
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if a.shape != b.shape:
        raise ValueError("index arrays differ in length")
    if a.size and (a.min() < 0 or a.max() >= na or b.min() < 0 or b.max() >= nb):
        raise ValueError("pair index out of range")
    flat = np.bincount(a * nb + b, minlength=na * nb)
    return flat.reshape(na, nb).astype(np.int64)
