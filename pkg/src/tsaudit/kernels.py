"""Kernel dispatch: compiled extension when built, numpy fallback otherwise.

Set ``TSAUDIT_PURE_PYTHON=1`` to force the fallback.
"""
from __future__ import annotations

import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py
if os.environ.get("TSAUDIT_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _kernels_py

import numpy as np


def pava(y, w=None) -> np.ndarray:
    """Nondecreasing least-squares fit to ``y`` with weights ``w``."""
    y = np.ascontiguousarray(y, dtype=float)
    w = np.ones_like(y) if w is None else np.ascontiguousarray(w, dtype=float)
    return np.asarray(_impl.pava(y, w))


def meanshift_dp(x, max_breaks: int, min_seg: int):
    """Minimal SSR and break indices for 0..max_breaks mean shifts."""
    x = np.ascontiguousarray(x, dtype=float)
    ssr, ends = _impl.meanshift_dp(x, int(max_breaks), int(min_seg))
    return np.asarray(ssr, dtype=float), [list(e) for e in ends]


def self_consistent_window(acf, c: float = 5.0) -> tuple[float, int]:
    """Running 0.5 + sum(acf[1:M]) stopped at the first M >= c * tau."""
    acf = np.ascontiguousarray(acf, dtype=float)
    tau, m = _impl.self_consistent_window(acf, float(c))
    return float(tau), int(m)


def use_backend(name: str):
    """Switch backend at runtime (benchmarks and tests). Returns previous name."""
    global _impl, BACKEND
    prev = BACKEND
    if name == "python":
        _impl, BACKEND = _kernels_py, "python"
    elif name == "cython":
        from . import _kernels

        _impl, BACKEND = _kernels, "cython"
    else:
        raise ValueError(name)
    return prev
