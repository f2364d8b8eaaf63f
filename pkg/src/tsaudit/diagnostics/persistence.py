"""Serial-dependence diagnostics: integrated autocorrelation time and Ljung-Box."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .. import kernels
from ..core import TimeSeriesMatrix
from ..errors import ConstantSeries, LowSample

MIN_OBS = 30
WINDOW_C = 5.0


@dataclass
class PersistenceBlock:
    tau_int: list[float]
    t_eff: float
    t_eff_ratio: float
    ljung_box_pvalues: list[float]
    window: list[int]


def autocorrelation(x: np.ndarray) -> np.ndarray:
    """Biased sample autocorrelation for lags 0..n-1 via FFT."""
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    xc = x - x.mean()
    size = 1 << (2 * n - 1).bit_length()
    f = np.fft.rfft(xc, size)
    acov = np.fft.irfft(f * np.conjugate(f), size)[:n]
    if acov[0] <= 0:
        raise ConstantSeries("zero variance")
    return acov / acov[0]


def integrated_autocorr_time(x, c: float = WINDOW_C, return_window: bool = False):
    """tau_int = 1/2 + sum of autocorrelations up to a self-consistent window.

    The window is the smallest M with M >= c * tau_int(M). The result is
    never below 0.5.
    """
    x = np.asarray(x, dtype=float).ravel()
    if x.shape[0] < MIN_OBS:
        raise LowSample(f"need >= {MIN_OBS} points, got {x.shape[0]}")
    if np.ptp(x) == 0:
        raise ConstantSeries("constant series has no autocorrelation time")
    rho = autocorrelation(x)
    tau, m = kernels.self_consistent_window(rho, c)
    tau = max(tau, 0.5)
    return (tau, m) if return_window else tau


def ljung_box_pvalue(x: np.ndarray, lags: int | None = None) -> float:
    n = x.shape[0]
    if lags is None:
        lags = max(1, min(10, n // 5))
    rho = autocorrelation(x)[1 : lags + 1]
    q = n * (n + 2) * float(np.sum(rho**2 / (n - np.arange(1, lags + 1))))
    return float(stats.chi2.sf(q, lags))


def effective_sample_size(T: int, tau_max: float) -> float:
    return float(min(max(T / (2.0 * tau_max), np.finfo(float).tiny), T))


def audit_persistence(series: TimeSeriesMatrix) -> PersistenceBlock:
    counts = (~series.mask).sum(axis=0)
    if np.any(counts < MIN_OBS):
        j = int(np.argmin(counts))
        raise LowSample(f"column {series.names[j]!r}: {counts[j]} observations < {MIN_OBS}")
    taus, windows, lb = [], [], []
    for j in range(series.N):
        x = series.observed(j)
        if np.ptp(x) == 0:
            taus.append(0.5)
            windows.append(0)
            lb.append(1.0)
            continue
        tau, m = integrated_autocorr_time(x, return_window=True)
        taus.append(float(tau))
        windows.append(int(m))
        lb.append(ljung_box_pvalue(x))
    t_eff = effective_sample_size(series.T, max(taus))
    return PersistenceBlock(taus, t_eff, t_eff / series.T, lb, windows)
