"""Backend selection for the numerical kernels.

The compiled Cython module is preferred. Setting ``CONDCODING_PURE_PYTHON=1``
forces the fallback, which is also used whenever the extension was not built.
``BACKEND`` names the active implementation.
"""
import os

import numpy as np

from condcoding import _pykernels

TINY = _pykernels.TINY

if os.environ.get("CONDCODING_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from condcoding import _ckernels as _impl
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"
    else:
        BACKEND = "cython"


def compensated_sum(a):
    return _impl.compensated_sum(np.ascontiguousarray(a, dtype=np.float64).ravel())


def entropy_bits(p):
    return _impl.entropy_bits(np.ascontiguousarray(p, dtype=np.float64).ravel())


def shear_residual(joint):
    return _impl.shear_residual(np.ascontiguousarray(joint, dtype=np.float64))


def count_pairs(a, b, na, nb):
    return _impl.count_pairs(
        np.ascontiguousarray(a, dtype=np.int64),
        np.ascontiguousarray(b, dtype=np.int64),
        int(na),
        int(nb),
    )
