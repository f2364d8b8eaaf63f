"""VAR-based Granger discovery and graph scoring against ground truth."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .core import SummaryGraph, TimeSeriesMatrix
from .diagnostics.multitest import benjamini_yekutieli
from .errors import LowSample, SingularDesign, UniverseMismatch

FPR_FAIL = 0.50
FNR_FAIL = 0.80


@dataclass
class GrangerResult:
    graph: SummaryGraph
    pvalues: np.ndarray  # [source, target], before correction
    corrected: np.ndarray
    coefs: np.ndarray  # [source, target, lag-1]
    n_rows: np.ndarray  # rows used per target
    alpha: float = 0.05

    @property
    def raw_graph(self) -> SummaryGraph:
        """Edges significant before the FDR correction."""
        return _edges(self.pvalues, self.coefs, self.graph.tau_max, self.alpha)


def _edges(p: np.ndarray, coefs: np.ndarray, tau_max: int, alpha: float) -> SummaryGraph:
    N = p.shape[0]
    edges = set()
    for i in range(N):
        for j in range(N):
            if p[i, j] <= alpha:
                lag = int(np.argmax(np.abs(coefs[i, j]))) + 1
                edges.add((i, j, lag))
    return SummaryGraph(N, tau_max, frozenset(edges))


def _lagged(series: TimeSeriesMatrix, target: int, tau_max: int) -> tuple[np.ndarray, np.ndarray]:
    V, M = series.values, series.mask
    T = series.T
    ok = ~M[tau_max:, target]
    blocks = []
    for lag in range(1, tau_max + 1):
        ok = ok & ~M[tau_max - lag : T - lag].any(axis=1)
        blocks.append(V[tau_max - lag : T - lag])
    # column order: lag-major, then variable
    X = np.hstack(blocks)[ok]
    y = V[tau_max:, target][ok]
    return X, y


def granger_tests(series: TimeSeriesMatrix, tau_max: int = 1, alpha: float = 0.05) -> GrangerResult:
    """Per-pair F-tests of joint exclusion of a source's lags from a VAR(tau_max)."""
    if tau_max < 1:
        raise ValueError("tau_max must be >= 1")
    N = series.N
    need = 10 * N * tau_max
    p = np.ones((N, N))
    coefs = np.zeros((N, N, tau_max))
    rows = np.zeros(N, dtype=int)
    for j in range(N):
        X, y = _lagged(series, j, tau_max)
        n = y.shape[0]
        rows[j] = n
        if n < need:
            raise LowSample(f"target {series.names[j]!r}: {n} complete rows < {need}")
        Z = np.column_stack([np.ones(n), X])
        k = Z.shape[1]
        beta, _, rank, _ = np.linalg.lstsq(Z, y, rcond=None)
        if rank < k:
            raise SingularDesign(f"target {series.names[j]!r}: rank {rank} < {k}")
        e = y - Z @ beta
        ssr_f = float(e @ e)
        dof = n - k
        if ssr_f <= 0:
            raise SingularDesign(f"target {series.names[j]!r}: perfect fit")
        for i in range(N):
            cols = [1 + (lag - 1) * N + i for lag in range(1, tau_max + 1)]
            coefs[i, j] = beta[cols]
            keep = np.ones(k, dtype=bool)
            keep[cols] = False
            Zr = Z[:, keep]
            br = np.linalg.lstsq(Zr, y, rcond=None)[0]
            er = y - Zr @ br
            ssr_r = float(er @ er)
            f = ((ssr_r - ssr_f) / tau_max) / (ssr_f / dof)
            p[i, j] = float(stats.f.sf(max(f, 0.0), tau_max, dof))
    corrected = benjamini_yekutieli(p.ravel()).reshape(N, N)
    graph = _edges(corrected, coefs, tau_max, alpha)
    return GrangerResult(graph, p, corrected, coefs, rows, alpha)


def var_granger_discover(series: TimeSeriesMatrix, tau_max: int = 1, alpha: float = 0.05) -> SummaryGraph:
    """Lagged summary graph from BY-corrected Granger F-tests."""
    return granger_tests(series, tau_max, alpha).graph


@dataclass(frozen=True)
class GraphScore:
    tp: int
    fp: int
    fn: int
    tn: int
    fpr: float
    fnr: float
    precision: float
    recall: float
    f1: float
    adjacency: "GraphScore | None" = None

    def to_dict(self) -> dict:
        out = {k: getattr(self, k) for k in ("tp", "fp", "fn", "tn", "fpr", "fnr", "precision", "recall", "f1")}
        if self.adjacency is not None:
            out["adjacency"] = self.adjacency.to_dict()
        return out


def _rates(tp: int, fp: int, fn: int, tn: int) -> tuple[float, float, float, float, float]:
    fpr = fp / (fp + tn) if fp + tn else 0.0
    fnr = fn / (tp + fn) if tp + fn else 0.0
    if tp + fp:
        precision = tp / (tp + fp)
    else:
        precision = 1.0 if fn == 0 else 0.0
    recall = 1.0 - fnr
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return fpr, fnr, precision, recall, f1


def score_graph(estimated: SummaryGraph, truth: SummaryGraph,
                include_contemporaneous: bool = False) -> GraphScore:
    """Exact-triple confusion counts, plus a lag-insensitive adjacency score.

    The candidate universe is every (i, j, lag) with lag in 1..tau_max.
    Contemporaneous pairs (i != j, lag 0) join it when requested or when
    either graph carries a lag-0 edge.
    """
    if estimated.n_vars != truth.n_vars or estimated.tau_max != truth.tau_max:
        raise UniverseMismatch(
            f"estimated ({estimated.n_vars}, {estimated.tau_max}) vs truth ({truth.n_vars}, {truth.tau_max})"
        )
    N, tmax = truth.n_vars, truth.tau_max
    lag0 = include_contemporaneous or any(t == 0 for *_, t in estimated.edges | truth.edges)
    universe = N * N * tmax + (N * (N - 1) if lag0 else 0)
    est, tru = estimated.edges, truth.edges
    tp = len(est & tru)
    fp = len(est - tru)
    fn = len(tru - est)
    tn = universe - tp - fp - fn
    ea, ta = estimated.adjacency(), truth.adjacency()
    atp, afp, afn = len(ea & ta), len(ea - ta), len(ta - ea)
    atn = N * N - atp - afp - afn
    adj = GraphScore(atp, afp, afn, atn, *_rates(atp, afp, afn, atn))
    return GraphScore(tp, fp, fn, tn, *_rates(tp, fp, fn, tn), adjacency=adj)


def failure_label(score: GraphScore) -> bool:
    """True when the discovered graph counts as a method failure."""
    return score.fpr > FPR_FAIL or score.fnr > FNR_FAIL
