"""Pure-Python/numpy versions of the compiled kernels in ``_kernels.pyx``."""
from __future__ import annotations

import numpy as np


def pava(y: np.ndarray, w: np.ndarray) -> np.ndarray:
    vals: list[float] = []
    wts: list[float] = []
    sizes: list[int] = []
    for yi, wi in zip(y.tolist(), w.tolist()):
        vals.append(yi)
        wts.append(wi)
        sizes.append(1)
        while len(vals) > 1 and vals[-2] > vals[-1]:
            v, wt, s = vals.pop(), wts.pop(), sizes.pop()
            nw = wts[-1] + wt
            vals[-1] = (wts[-1] * vals[-1] + wt * v) / nw
            wts[-1] = nw
            sizes[-1] += s
    return np.repeat(np.asarray(vals, dtype=float), sizes)


def meanshift_dp(x: np.ndarray, max_breaks: int, min_seg: int):
    n = x.shape[0]
    s1 = np.concatenate([[0.0], np.cumsum(x)])
    s2 = np.concatenate([[0.0], np.cumsum(x * x)])
    cost = np.full((max_breaks + 1, n + 1), np.inf)
    arg = np.full((max_breaks + 1, n + 1), -1, dtype=np.intp)
    j = np.arange(min_seg, n + 1)
    cost[0, j] = s2[j] - s1[j] ** 2 / j
    for m in range(1, max_breaks + 1):
        for jj in range((m + 1) * min_seg, n + 1):
            i = np.arange(m * min_seg, jj - min_seg + 1)
            d = s1[jj] - s1[i]
            cand = cost[m - 1, i] + (s2[jj] - s2[i]) - d * d / (jj - i)
            if cand.size == 0 or not np.isfinite(cand).any():
                continue
            k = int(np.argmin(cand))
            cost[m, jj] = cand[k]
            arg[m, jj] = i[k]
    ssr = cost[:, n].copy()
    ends = []
    for m in range(max_breaks + 1):
        bks = []
        if np.isfinite(cost[m, n]):
            jj = n
            for k in range(m, 0, -1):
                jj = int(arg[k, jj])
                bks.append(jj)
        ends.append(sorted(bks))
    return ssr, ends


def self_consistent_window(acf: np.ndarray, c: float):
    n = acf.shape[0]
    if n < 2:
        return 0.5, 0
    taus = 0.5 + np.cumsum(acf[1:])
    m = np.arange(1, n)
    ok = np.nonzero(m >= c * taus)[0]
    if ok.size:
        k = int(ok[0])
        return float(taus[k]), int(m[k])
    return float(taus[-1]), n - 1
