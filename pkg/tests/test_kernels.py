"""Compiled and pure-Python kernels must agree."""
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from tsaudit import _kernels_py, kernels

try:
    from tsaudit import _kernels as _kc
except ImportError:  # extension not built
    _kc = None

needs_ext = pytest.mark.skipif(_kc is None, reason="compiled extension not built")
vals = st.floats(-100, 100, allow_nan=False)


class TestPavaReference:
    def test_hand_cases(self):
        w = np.ones(3)
        assert np.allclose(_kernels_py.pava(np.array([0.0, 0.0, 1.0]), w), [0, 0, 1])
        assert np.allclose(_kernels_py.pava(np.array([1.0, 0.0, 1.0]), w), [0.5, 0.5, 1.0])
        assert np.allclose(_kernels_py.pava(np.array([1.0, 1.0, 0.0, 0.0]), np.ones(4)), [0.5] * 4)

    @given(arrays(np.float64, st.integers(1, 40), elements=vals))
    def test_monotone_and_mean_preserving(self, y):
        f = _kernels_py.pava(y, np.ones_like(y))
        assert np.all(np.diff(f) >= -1e-9)
        assert np.isclose(f.sum(), y.sum(), atol=1e-6 * max(1, np.abs(y).sum()))


@needs_ext
class TestBackendParity:
    @given(arrays(np.float64, st.integers(1, 60), elements=vals),
           arrays(np.float64, 60, elements=st.floats(0.1, 5)))
    def test_pava(self, y, w):
        w = w[: y.size].copy()
        assert np.allclose(_kc.pava(y, w), _kernels_py.pava(y, w), atol=1e-9)

    @given(arrays(np.float64, st.integers(20, 80), elements=vals), st.integers(0, 3), st.integers(2, 6))
    def test_meanshift_dp(self, x, k, m):
        s1, e1 = _kc.meanshift_dp(x, k, m)
        s2, e2 = _kernels_py.meanshift_dp(x, k, m)
        assert np.allclose(np.asarray(s1), np.asarray(s2), rtol=1e-9, atol=1e-7, equal_nan=True)
        fin = np.isfinite(np.asarray(s2))
        assert [list(a) for a, f in zip(e1, fin) if f] == [list(b) for b, f in zip(e2, fin) if f]

    @given(arrays(np.float64, st.integers(2, 200), elements=st.floats(-1, 1)), st.floats(1, 10))
    def test_window(self, acf, c):
        acf = acf.copy()
        acf[0] = 1.0
        t1, m1 = _kc.self_consistent_window(acf, c)
        t2, m2 = _kernels_py.self_consistent_window(acf, c)
        assert m1 == m2 and np.isclose(t1, t2)


def test_use_backend_switches_and_restores():
    prev = kernels.use_backend("python")
    try:
        assert kernels.BACKEND == "python"
        assert np.allclose(kernels.pava([1.0, 0.0]), [0.5, 0.5])
    finally:
        if prev == "cython":
            kernels.use_backend("cython")
    with pytest.raises(ValueError):
        kernels.use_backend("fortran")
