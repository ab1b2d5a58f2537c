import math

import numpy as np
import pytest

from condcoding import _pykernels, kernels

try:
    from condcoding import _ckernels
except ImportError:  # pragma: no cover - depends on the build
    _ckernels = None

BACKENDS = [pytest.param(_pykernels, id="python"),
            pytest.param(_ckernels, id="cython",
                         marks=pytest.mark.skipif(_ckernels is None, reason="extension not built"))]


@pytest.mark.parametrize("impl", BACKENDS)
def test_entropy_bits_basic(impl):
    assert impl.entropy_bits(np.array([0.5, 0.5])) == 1.0
    assert impl.entropy_bits(np.array([1.0, 0.0, 0.0])) == 0.0
    assert impl.entropy_bits(np.full(256, 1 / 256)) == pytest.approx(8.0, abs=1e-12)
    # sub-1e-300 entries are treated as exact zeros
    assert impl.entropy_bits(np.array([1.0, 1e-310])) == 0.0


@pytest.mark.parametrize("impl", BACKENDS)
def test_compensated_sum_is_accurate(impl):
    a = np.array([1.0, 1e-16, 1e-16, 1e-16, 1e-16, -1.0])
    assert impl.compensated_sum(a) == pytest.approx(4e-16, rel=1e-12)
    rng = np.random.default_rng(3)
    b = rng.random(100_000)
    assert impl.compensated_sum(b) == pytest.approx(math.fsum(b.tolist()), rel=0, abs=1e-11)


@pytest.mark.parametrize("impl", BACKENDS)
def test_shear_residual(impl):
    j = np.arange(6, dtype=float).reshape(2, 3)
    out = impl.shear_residual(j)
    assert out.shape == (4, 3)
    # out[i - j + ncol - 1, j] == j[i, j]
    for i in range(2):
        for c in range(3):
            assert out[i - c + 2, c] == j[i, c]
    assert out.sum() == j.sum()


@pytest.mark.parametrize("impl", BACKENDS)
def test_count_pairs(impl):
    a = np.array([0, 1, 1, 2], dtype=np.int64)
    b = np.array([1, 0, 0, 1], dtype=np.int64)
    c = impl.count_pairs(a, b, 3, 2)
    assert c.tolist() == [[0, 1], [2, 0], [0, 1]]
    with pytest.raises(ValueError):
        impl.count_pairs(np.array([3], dtype=np.int64), np.array([0], dtype=np.int64), 3, 2)


@pytest.mark.skipif(_ckernels is None, reason="extension not built")
def test_backends_agree(rng):
    for n in (1, 7, 256, 65536):
        p = rng.random(n)
        p[rng.random(n) < 0.3] = 0.0
        p /= p.sum() or 1.0
        assert _ckernels.entropy_bits(p) == pytest.approx(_pykernels.entropy_bits(p), abs=1e-13)
        assert _ckernels.compensated_sum(p) == pytest.approx(_pykernels.compensated_sum(p), abs=1e-15)
    j = rng.random((17, 9))
    np.testing.assert_array_equal(_ckernels.shear_residual(j), _pykernels.shear_residual(j))
    a = rng.integers(0, 13, 5000)
    b = rng.integers(0, 5, 5000)
    np.testing.assert_array_equal(_ckernels.count_pairs(a, b, 13, 5), _pykernels.count_pairs(a, b, 13, 5))


def test_dispatcher_reports_backend():
    assert kernels.BACKEND in ("cython", "python")
    assert kernels.entropy_bits([0.25] * 4) == 2.0
