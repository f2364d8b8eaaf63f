"""False-discovery-rate adjustment."""
from __future__ import annotations

import numpy as np

from ..errors import InvalidP


def benjamini_yekutieli(pvalues) -> np.ndarray:
    """Benjamini-Yekutieli step-up adjusted p-values.

    Valid under arbitrary dependence between the tests. Output is in the
    input order, clamped to [0, 1].

    >>> benjamini_yekutieli([0.01, 0.02, 0.03]).round(3).tolist()
    [0.055, 0.055, 0.055]
    """
    p = np.asarray(pvalues, dtype=float).ravel()
    if p.size == 0:
        return p
    if np.any(~np.isfinite(p)) or np.any(p < 0) or np.any(p > 1):
        raise InvalidP(f"p-values must lie in [0, 1]: {p}")
    m = p.size
    c_m = np.sum(1.0 / np.arange(1, m + 1))
    order = np.argsort(p, kind="mergesort")
    ranked = p[order] * m * c_m / np.arange(1, m + 1)
    ranked = np.minimum.accumulate(ranked[::-1])[::-1]
    out = np.empty(m)
    out[order] = np.clip(ranked, 0.0, 1.0)
    return out
