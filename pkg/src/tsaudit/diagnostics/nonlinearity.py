"""Linear vs tree-ensemble forecast comparison on shared lag features."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import TimeSeriesMatrix
from ..errors import DegenerateTarget, LowSample

N_LAGS = 5
MIN_ROWS = 100
FLAG_LEVEL = 0.30


@dataclass
class NonlinearityBlock:
    delta_rmse_rel: list[float]
    flagged: bool
    applicable: bool = True


def lag_design(series: TimeSeriesMatrix, target: int, p: int = N_LAGS) -> tuple[np.ndarray, np.ndarray]:
    """Rows ``t`` with the target and all ``p`` lags of every column observed."""
    V, M = series.values, series.mask
    T = series.T
    ok = ~M[p:, target]
    cols = []
    for lag in range(1, p + 1):
        ok &= ~M[p - lag : T - lag].any(axis=1)
        cols.append(V[p - lag : T - lag])
    X = np.hstack(cols)[ok]
    y = V[p:, target][ok]
    return X, y


def _rmse(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.sqrt(np.mean((a - b) ** 2)))


def delta_rmse_rel(X: np.ndarray, y: np.ndarray, folds: int = 3, seed: int = 0) -> float:
    """Relative RMSE gain of the tree ensemble over OLS, forward-chained folds."""
    from sklearn.ensemble import RandomForestRegressor

    n = y.shape[0]
    edges = np.linspace(0, n, folds + 2).astype(int)
    lin, rf = [], []
    for k in range(1, folds + 1):
        tr = slice(0, edges[k])
        te = slice(edges[k], edges[k + 1])
        Xtr = np.column_stack([np.ones(edges[k]), X[tr]])
        Xte = np.column_stack([np.ones(edges[k + 1] - edges[k]), X[te]])
        beta = np.linalg.lstsq(Xtr, y[tr], rcond=None)[0]
        lin.append(_rmse(Xte @ beta, y[te]))
        model = RandomForestRegressor(
            n_estimators=100, max_depth=6, max_samples=0.8, max_features=0.5,
            random_state=seed, n_jobs=1,
        )
        model.fit(X[tr], y[tr])
        rf.append(_rmse(model.predict(X[te]), y[te]))
    r_lin = float(np.mean(lin))
    if r_lin == 0:
        return 0.0
    return (r_lin - float(np.mean(rf))) / r_lin


def audit_nonlinearity(series: TimeSeriesMatrix, folds: int = 3, seed: int = 0) -> NonlinearityBlock:
    out = []
    for j in range(series.N):
        X, y = lag_design(series, j)
        if y.shape[0] < MIN_ROWS:
            raise LowSample(f"column {series.names[j]!r}: {y.shape[0]} lagged rows < {MIN_ROWS}")
        if np.ptp(y) == 0:
            raise DegenerateTarget(f"column {series.names[j]!r} is constant")
        out.append(delta_rmse_rel(X, y, folds=folds, seed=seed))
    return NonlinearityBlock(out, bool(max(out) > FLAG_LEVEL))
