"""Multicollinearity and parameter-stability proxies for latent confounding."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from ..core import TimeSeriesMatrix
from ..errors import LowSample
from .multitest import benjamini_yekutieli

VIF_CAP = 1e8


@dataclass
class ConfoundingBlock:
    vif: list[float]
    chow_pvalue: float
    resid_var_instability: float
    vif_capped: bool = False
    chow_pvalues_per_var: list[float] = field(default_factory=list)
    design: str = "complete-case"


def vif_from_corr(R: np.ndarray) -> tuple[np.ndarray, bool]:
    """VIF_j = 1/(1 - R_j^2), read off the inverse correlation matrix."""
    p = R.shape[0]
    if p == 1:
        return np.ones(1), False
    w = np.linalg.eigvalsh(R)
    if w.min() <= 1e-12 * max(w.max(), 1.0):
        out = np.empty(p)
        capped = False
        for j in range(p):
            o = np.arange(p) != j
            sol = np.linalg.lstsq(R[np.ix_(o, o)], R[o, j], rcond=1e-12)[0]
            r2 = float(R[o, j] @ sol)
            if r2 >= 1.0 - 1.0 / VIF_CAP:
                out[j] = VIF_CAP
                capped = True
            else:
                out[j] = 1.0 / (1.0 - r2)
        return out, capped
    v = np.diag(np.linalg.inv(R))
    capped = bool(np.any(v >= VIF_CAP))
    return np.clip(v, 1.0, VIF_CAP), capped


def variance_inflation(X: np.ndarray) -> tuple[np.ndarray, bool]:
    sd = X.std(axis=0)
    live = sd > 0
    out = np.ones(X.shape[1])
    if live.sum() < 2:
        return out, False
    R = np.corrcoef(X[:, live], rowvar=False)
    v, capped = vif_from_corr(np.atleast_2d(R))
    out[live] = v
    return out, capped


def _pairwise_corr(values: np.ndarray, mask: np.ndarray) -> np.ndarray:
    p = values.shape[1]
    R = np.eye(p)
    for a in range(p):
        for b in range(a + 1, p):
            ok = ~(mask[:, a] | mask[:, b])
            if ok.sum() > 2:
                r = np.corrcoef(values[ok, a], values[ok, b])[0, 1]
                R[a, b] = R[b, a] = 0.0 if not np.isfinite(r) else r
    w, V = np.linalg.eigh(R)
    R = (V * np.maximum(w, 0.0)) @ V.T
    d = np.sqrt(np.clip(np.diag(R), 1e-300, None))
    return R / np.outer(d, d)


def _ols_ssr(X: np.ndarray, y: np.ndarray) -> tuple[float, np.ndarray]:
    beta, *_ = np.linalg.lstsq(X, y, rcond=None)
    e = y - X @ beta
    return float(e @ e), e


def chow_test(X: np.ndarray, y: np.ndarray, split: int) -> float:
    """Chow F-test p-value for a coefficient change at row ``split``."""
    n, k = X.shape
    if split < k + 1 or n - split < k + 1:
        return 1.0
    ssr_p, _ = _ols_ssr(X, y)
    ssr_1, _ = _ols_ssr(X[:split], y[:split])
    ssr_2, _ = _ols_ssr(X[split:], y[split:])
    ssr_u = ssr_1 + ssr_2
    dof = n - 2 * k
    if ssr_u <= 0 or dof <= 0:
        return 1.0
    f = ((ssr_p - ssr_u) / k) / (ssr_u / dof)
    return float(stats.f.sf(max(f, 0.0), k, dof))


def rolling_variance_ratio(e: np.ndarray, window: int) -> float:
    """max/min of rolling-window residual variance."""
    n = e.shape[0]
    window = max(min(window, n), 2)
    c1 = np.concatenate([[0.0], np.cumsum(e)])
    c2 = np.concatenate([[0.0], np.cumsum(e * e)])
    s1 = c1[window:] - c1[:-window]
    s2 = c2[window:] - c2[:-window]
    var = (s2 - s1 * s1 / window) / (window - 1)
    lo = var.min()
    if lo <= 0:
        return math.inf if var.max() > 0 else 1.0
    return float(var.max() / lo)


def audit_confounding(series: TimeSeriesMatrix) -> ConfoundingBlock:
    N = series.N
    if N < 2:
        raise LowSample("confounding proxies need N >= 2")
    n_obs = int(series.row_observed().sum())
    if n_obs < 10 * N:
        raise LowSample(f"{n_obs} observed rows < 10*N = {10 * N}")
    complete = series.complete_rows()
    V = series.values
    # VAR(1) rows need both t and t-1 complete
    pair_ok = complete[1:] & complete[:-1]
    if complete.sum() < 10 * N or pair_ok.sum() < 10 * (N + 1):
        vif, capped = vif_from_corr(_pairwise_corr(V, series.mask))
        return ConfoundingBlock(vif.tolist(), 1.0, 1.0, capped, [1.0] * N, "pairwise-fallback")

    vif, capped = variance_inflation(V[complete])
    Y = V[1:][pair_ok]
    X = np.column_stack([np.ones(int(pair_ok.sum())), V[:-1][pair_ok]])
    n = Y.shape[0]
    split = n // 2
    chow_raw, ratios = [], []
    window = max(n // 5, 10)
    for j in range(N):
        y = Y[:, j]
        if np.ptp(y) == 0:
            chow_raw.append(1.0)
            ratios.append(1.0)
            continue
        chow_raw.append(chow_test(X, y, split))
        _, e = _ols_ssr(X, y)
        ratios.append(rolling_variance_ratio(e, window))
    chow_c = benjamini_yekutieli(chow_raw)
    return ConfoundingBlock(
        vif=vif.tolist(),
        chow_pvalue=float(chow_c.min()),
        resid_var_instability=float(max(ratios)),
        vif_capped=capped,
        chow_pvalues_per_var=[float(c) for c in chow_raw],
    )
