"""Unit-root, level-stationarity, structural-break and drift diagnostics."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .. import kernels
from ..core import TimeSeriesMatrix
from ..errors import ConstantSeries, LowSample

MIN_OBS = 50


@dataclass
class BreakResult:
    count: int
    locations: list[int]
    magnitude: float
    segment_means: list[float]
    pooled_sd: float


@dataclass
class StationarityBlock:
    adf_pvalues: list[float]
    kpss_pvalues: list[float]
    adf_corrected: list[float]
    kpss_corrected: list[float]
    break_count: int
    break_magnitude: float
    break_locations: list[float]
    break_counts_per_var: list[int]
    drift_slope_z: list[float]
    degenerate_columns: list[int] = field(default_factory=list)


def _newey_west_lrv(e: np.ndarray, bandwidth: int) -> float:
    n = e.shape[0]
    s = float(e @ e) / n
    for lag in range(1, min(bandwidth, n - 1) + 1):
        w = 1.0 - lag / (bandwidth + 1.0)
        s += 2.0 * w * float(e[lag:] @ e[:-lag]) / n
    return s


def _cvm_cdf(x: float) -> float:
    # limiting law of the level KPSS statistic = Cramer-von Mises omega^2
    if x <= 0.0:
        return 0.0
    if x >= 3.0:
        return 1.0
    tot = 0.0
    for k in range(200):
        y = 4 * k + 1
        q = y * y / (16.0 * x)
        u = math.exp(special.gammaln(k + 0.5) - special.gammaln(k + 1)) / (math.pi**1.5 * math.sqrt(x))
        term = u * math.sqrt(y) * math.exp(-q) * special.kv(0.25, q)
        tot += term
        if abs(term) < 1e-12:
            break
    return min(max(tot, 0.0), 1.0)


def kpss_level(x: np.ndarray, nlags: int | None = None) -> tuple[float, float]:
    """KPSS level-stationarity statistic and its asymptotic p-value."""
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    if nlags is None:
        nlags = int(4 * (n / 100.0) ** 0.25)
    e = x - x.mean()
    lrv = _newey_west_lrv(e, nlags)
    if lrv <= 0:
        raise ConstantSeries("zero long-run variance")
    s = np.cumsum(e)
    stat = float(s @ s) / (n * n * lrv)
    return stat, 1.0 - _cvm_cdf(stat)


def adf_pvalue(x: np.ndarray) -> float:
    """ADF p-value (constant, AIC lag choice up to 12*(T/100)^0.25)."""
    from statsmodels.tsa.stattools import adfuller

    n = x.shape[0]
    maxlag = int(12 * (n / 100.0) ** 0.25)
    maxlag = min(maxlag, n // 2 - 2)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        res = adfuller(x, maxlag=maxlag, regression="c", autolag="AIC")
    return float(min(max(res[1], 0.0), 1.0))


def drift_slope_z(t: np.ndarray, x: np.ndarray) -> float:
    """OLS trend slope divided by its Newey-West standard error."""
    n = x.shape[0]
    tc = t - t.mean()
    sxx = float(tc @ tc)
    b = float(tc @ (x - x.mean())) / sxx
    e = x - x.mean() - b * tc
    bw = int(4 * (n / 100.0) ** 0.25)
    u = tc * e
    meat = float(u @ u)
    for lag in range(1, min(bw, n - 1) + 1):
        w = 1.0 - lag / (bw + 1.0)
        meat += 2.0 * w * float(u[lag:] @ u[:-lag])
    se = math.sqrt(max(meat, 1e-300)) / sxx
    return b / se if se > 0 else 0.0


def bai_perron_mean(x: np.ndarray, max_breaks: int = 3, trim: float = 0.15, min_len: int = 30) -> BreakResult:
    """Mean-shift breaks located by dynamic programming, count chosen by BIC.

    The BIC likelihood term is divided by the long-run variance factor
    (1 + phi) / (1 - phi) of the residuals from the richest model, so that
    serial correlation alone does not produce spurious breaks.
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    h = max(int(math.ceil(trim * n)), min_len)
    m_max = max(0, min(max_breaks, n // h - 1))
    ssr, ends = kernels.meanshift_dp(x, m_max, h)
    feasible = [m for m in range(m_max + 1) if np.isfinite(ssr[m])]
    m_top = feasible[-1]
    resid = _segment_residuals(x, ends[m_top])
    phi = 0.0
    if resid.std() > 0:
        phi = float(np.clip(np.corrcoef(resid[1:], resid[:-1])[0, 1], 0.0, 0.95))
    kappa = (1.0 + phi) / (1.0 - phi)
    floor = 1e-12 * max(float(x @ x), 1e-300)
    ic = [(n / kappa) * math.log(max(ssr[m], floor) / n) + 2 * m * math.log(n) for m in feasible]
    m_best = feasible[int(np.argmin(ic))]
    bks = ends[m_best]
    bounds = [0, *bks, n]
    means = [float(x[a:b].mean()) for a, b in zip(bounds[:-1], bounds[1:])]
    dof = max(n - (m_best + 1), 1)
    pooled = math.sqrt(max(ssr[m_best], 0.0) / dof)
    jumps = np.abs(np.diff(means)) if m_best else np.zeros(0)
    mag = float(jumps.max() / pooled) if m_best and pooled > 0 else 0.0
    return BreakResult(m_best, list(bks), mag, means, pooled)


def _segment_residuals(x: np.ndarray, bks: list[int]) -> np.ndarray:
    bounds = [0, *bks, x.shape[0]]
    out = np.empty_like(x)
    for a, b in zip(bounds[:-1], bounds[1:]):
        out[a:b] = x[a:b] - x[a:b].mean()
    return out


def audit_stationarity(series: TimeSeriesMatrix, alpha: float = 0.05) -> StationarityBlock:
    from .multitest import benjamini_yekutieli

    counts = (~series.mask).sum(axis=0)
    if np.any(counts < MIN_OBS):
        j = int(np.argmin(counts))
        raise LowSample(f"column {series.names[j]!r}: {counts[j]} observations < {MIN_OBS}")
    adf, kp, z, nbreaks = [], [], [], []
    degenerate = []
    best = BreakResult(0, [], 0.0, [], 0.0)
    best_j = None
    for j in range(series.N):
        obs = ~series.mask[:, j]
        x = series.values[obs, j]
        t = series.timestamps[obs]
        if np.ptp(x) == 0:
            degenerate.append(j)
            adf.append(math.nan)
            kp.append(math.nan)
            z.append(0.0)
            nbreaks.append(0)
            continue
        adf.append(adf_pvalue(x))
        kp.append(kpss_level(x)[1])
        z.append(drift_slope_z(t, x))
        br = bai_perron_mean(x)
        nbreaks.append(br.count)
        if br.magnitude > best.magnitude or best_j is None:
            best, best_j = br, j
    live = [j for j in range(series.N) if j not in degenerate]
    adf_c = [math.nan] * series.N
    kp_c = [math.nan] * series.N
    if live:
        for j, v in zip(live, benjamini_yekutieli([adf[j] for j in live])):
            adf_c[j] = float(v)
        for j, v in zip(live, benjamini_yekutieli([kp[j] for j in live])):
            kp_c[j] = float(v)
    locs = []
    if best_j is not None:
        ts = series.timestamps[~series.mask[:, best_j]]
        locs = [float(ts[b]) for b in best.locations]
    return StationarityBlock(
        adf_pvalues=adf,
        kpss_pvalues=kp,
        adf_corrected=adf_c,
        kpss_corrected=kp_c,
        break_count=int(max(nbreaks) if nbreaks else 0),
        break_magnitude=float(best.magnitude),
        break_locations=locs,
        break_counts_per_var=nbreaks,
        drift_slope_z=z,
        degenerate_columns=degenerate,
    )
