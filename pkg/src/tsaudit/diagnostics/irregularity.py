"""Sampling-gap and missingness diagnostics."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from ..core import TimeSeriesMatrix
from ..errors import LowSample, TooFewPoints


@dataclass
class IrregularityBlock:
    gap_cv: float
    missing_fraction: float
    mcar_pvalue: float
    seasonal_missing_pvalue: float
    mcar_applicable: bool
    seasonal_applicable: bool
    mcar_method: str = "pairwise-complete moments"


def gap_coefficient_of_variation(timestamps) -> float:
    """Population SD of successive gaps over their mean.

    >>> round(gap_coefficient_of_variation([0, 1, 11]), 4)
    0.8182
    """
    t = np.asarray(timestamps, dtype=float).ravel()
    if t.size < 3:
        raise TooFewPoints(f"need >= 3 timestamps, got {t.size}")
    gaps = np.diff(t)
    mean = gaps.mean()
    if mean <= 0:
        raise ValueError("timestamps must be increasing")
    return float(gaps.std() / mean)


def little_mcar_pairwise(values: np.ndarray, mask: np.ndarray) -> tuple[float, int, float]:
    """Little's MCAR chi-square with pairwise-complete moments.

    Returns ``(statistic, dof, pvalue)``. Rows with every cell missing are
    ignored; patterns are compared against the pairwise mean/covariance
    rather than EM estimates.
    """
    keep = ~mask.all(axis=1)
    X = values[keep]
    M = mask[keep]
    n, p = X.shape
    obs = ~M
    mu = np.array([X[obs[:, j], j].mean() for j in range(p)])
    Z = np.where(obs, X - mu, 0.0)
    O = obs.astype(float)
    pair_n = O.T @ O
    with np.errstate(invalid="ignore", divide="ignore"):
        cov = (Z.T @ Z) / np.maximum(pair_n - 1, 1)
    cov = np.where(pair_n > 1, cov, 0.0)
    # unobserved pairs get zero covariance; clamp to PSD
    w, V = np.linalg.eigh((cov + cov.T) / 2)
    cov = (V * np.maximum(w, 1e-10 * max(w.max(), 1e-300))) @ V.T

    patterns, inverse = np.unique(M, axis=0, return_inverse=True)
    inverse = np.asarray(inverse).ravel()
    d2 = 0.0
    dof = 0
    for k, pat in enumerate(patterns):
        o = ~pat
        if not o.any():
            continue
        rows = inverse == k
        nk = int(rows.sum())
        diff = X[rows][:, o].mean(axis=0) - mu[o]
        S = cov[np.ix_(o, o)]
        d2 += nk * float(diff @ np.linalg.solve(S, diff))
        dof += int(o.sum())
    dof -= p
    if dof <= 0:
        return 0.0, 0, 1.0
    return d2, dof, float(stats.chi2.sf(d2, dof))


def _binomial_loglik(X: np.ndarray, k: np.ndarray, n: np.ndarray) -> float:
    beta = np.zeros(X.shape[1])
    p0 = np.clip(k.sum() / n.sum(), 1e-12, 1 - 1e-12)
    beta[0] = math.log(p0 / (1 - p0))
    for _ in range(50):
        eta = X @ beta
        mu = 1.0 / (1.0 + np.exp(-eta))
        W = n * mu * (1 - mu)
        grad = X.T @ (k - n * mu)
        H = X.T @ (X * W[:, None]) + 1e-9 * np.eye(X.shape[1])
        step = np.linalg.solve(H, grad)
        beta += step
        if np.max(np.abs(step)) < 1e-10:
            break
    eta = X @ beta
    # log-likelihood up to the binomial coefficient
    return float(np.sum(k * eta - n * np.logaddexp(0.0, eta)))


def seasonal_missingness_pvalue(timestamps: np.ndarray, mask: np.ndarray, period: float) -> float:
    """Likelihood-ratio test of per-row missing counts on one harmonic of ``period``."""
    k = mask.sum(axis=1).astype(float)
    n = np.full_like(k, mask.shape[1], dtype=float)
    phase = 2.0 * math.pi * np.asarray(timestamps, float) / float(period)
    X1 = np.column_stack([np.ones_like(phase), np.sin(phase), np.cos(phase)])
    ll1 = _binomial_loglik(X1, k, n)
    ll0 = _binomial_loglik(X1[:, :1], k, n)
    lr = max(2.0 * (ll1 - ll0), 0.0)
    return float(stats.chi2.sf(lr, 2))


def audit_irregularity(series: TimeSeriesMatrix, period_hint: float | None = None) -> IrregularityBlock:
    if series.T < 10:
        raise LowSample(f"irregularity diagnostics need T >= 10, got {series.T}")
    t_obs = series.timestamps[series.row_observed()]
    gap_cv = gap_coefficient_of_variation(t_obs) if t_obs.size >= 3 else 0.0
    frac = series.missing_fraction()
    if frac == 0.0:
        return IrregularityBlock(gap_cv, 0.0, 1.0, 1.0, False, False)
    _, _, mcar_p = little_mcar_pairwise(series.values, series.mask)
    seasonal_ok = period_hint is not None and period_hint > 0
    seas_p = seasonal_missingness_pvalue(series.timestamps, series.mask, period_hint) if seasonal_ok else 1.0
    return IrregularityBlock(gap_cv, frac, mcar_p, seas_p, True, seasonal_ok)
