"""Calibration and selective-prediction metrics, and the benchmark harness."""
from __future__ import annotations

import csv
import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np
from scipy import special, stats

from .core import AuditConfig, child_rng
from .decision import DEFAULT_CATALOG, GRANGER, Decision, decide
from .diagnostics import audit
from .errors import AuditError, DegenerateP, LowSample, SingleClass
from .fixtures import evaluate_fixtures
from .risk import DIMENSIONS, Calibration, CorpusItem, Priors, calibrate_models, compute_risk_profile

P_CLIP = 1e-6
N_BINS = 10
MIN_N = 20


@dataclass
class CalibrationSummary:
    slope: float
    intercept: float
    ece: float
    brier: float
    auroc: float
    n: int
    bins: list[dict] = field(default_factory=list)
    converged: bool = True

    def to_dict(self) -> dict:
        return asdict(self)


def _check_inputs(pred, labels) -> tuple[np.ndarray, np.ndarray]:
    p = np.asarray(pred, dtype=float).ravel()
    y = np.asarray(labels, dtype=float).ravel()
    if p.shape != y.shape:
        raise ValueError(f"{p.shape[0]} predictions for {y.shape[0]} labels")
    if not np.all(np.isfinite(p)) or p.min() < 0 or p.max() > 1:
        raise DegenerateP("predictions must be finite and within [0, 1]")
    if not np.all((y == 0) | (y == 1)):
        raise ValueError("labels must be 0/1")
    return p, y


def logistic_recalibration(pred, labels, max_iter: int = 200) -> tuple[float, float, bool]:
    """Intercept and slope of labels regressed on logit(pred), by Newton steps.

    Returns ``(intercept, slope, converged)``. Under complete separation the
    likelihood has no maximum; iteration stops at ``max_iter`` with
    ``converged`` false and the last iterate reported.
    """
    p, y = _check_inputs(pred, labels)
    x = special.logit(np.clip(p, P_CLIP, 1 - P_CLIP))
    X = np.column_stack([np.ones_like(x), x])
    beta = np.zeros(2)

    def loglik(b):
        z = X @ b
        return float(np.sum(y * z - np.logaddexp(0.0, z)))

    ll = loglik(beta)
    for _ in range(max_iter):
        mu = special.expit(X @ beta)
        grad = X.T @ (y - mu)
        H = X.T @ (X * (mu * (1 - mu))[:, None])
        try:
            step = np.linalg.solve(H + 1e-12 * np.eye(2), grad)
        except np.linalg.LinAlgError:
            return float(beta[0]), float(beta[1]), False
        t = 1.0
        while t > 1e-10:
            cand = beta + t * step
            llc = loglik(cand)
            if llc >= ll - 1e-12:
                break
            t /= 2
        beta, ll_old, ll = cand, ll, llc
        if np.max(np.abs(t * step)) < 1e-9 or abs(ll - ll_old) < 1e-12:
            return float(beta[0]), float(beta[1]), True
    return float(beta[0]), float(beta[1]), False


def quantile_bins(pred, labels, n_bins: int = N_BINS) -> list[dict]:
    """Reliability table over quantile bins; tied predictions share a bin."""
    p, y = _check_inputs(pred, labels)
    edges = np.quantile(p, np.linspace(0, 1, n_bins + 1))
    idx = np.searchsorted(edges[1:-1], p, side="right")
    out = []
    for b in range(n_bins):
        sel = idx == b
        n = int(sel.sum())
        if n == 0:
            continue
        out.append({"bin": b, "lo": float(p[sel].min()), "hi": float(p[sel].max()),
                    "mean_predicted": float(p[sel].mean()), "empirical": float(y[sel].mean()), "count": n})
    return out


def expected_calibration_error(pred, labels, n_bins: int = N_BINS) -> float:
    bins = quantile_bins(pred, labels, n_bins)
    n = sum(b["count"] for b in bins)
    return float(sum(b["count"] * abs(b["mean_predicted"] - b["empirical"]) for b in bins) / n)


def auroc(pred, labels) -> float:
    """Rank-statistic AUROC with average ranks for ties."""
    p, y = _check_inputs(pred, labels)
    n1 = int(y.sum())
    n0 = y.size - n1
    if n1 == 0 or n0 == 0:
        raise SingleClass("AUROC needs both classes")
    r = stats.rankdata(p)
    return float((r[y == 1].sum() - n1 * (n1 + 1) / 2) / (n1 * n0))


def calibration_metrics(pred, labels, n_bins: int = N_BINS) -> CalibrationSummary:
    p, y = _check_inputs(pred, labels)
    if p.size < MIN_N:
        raise LowSample(f"{p.size} predictions < {MIN_N}")
    if y.min() == y.max():
        raise SingleClass("labels contain a single class")
    a, b, ok = logistic_recalibration(p, y)
    bins = quantile_bins(p, y, n_bins)
    ece = float(sum(bn["count"] * abs(bn["mean_predicted"] - bn["empirical"]) for bn in bins) / p.size)
    return CalibrationSummary(b, a, ece, float(np.mean((p - y) ** 2)), auroc(p, y), int(p.size), bins, ok)


@dataclass
class SelectiveSummary:
    n: int
    coverage: float
    failure_rate: float
    selective_fpr: float | None
    selective_f1: float | None
    abstention_precision: float | None
    precision_discourage: float | None
    recall_safe: float | None
    good_abstention_rate: float | None
    overall_accuracy: float

    def to_dict(self) -> dict:
        return asdict(self)


def _frac(num: int, den: int) -> float | None:
    return num / den if den else None


def selective_metrics(decisions: Sequence, failures: Sequence[bool], f1: Sequence[float] | None = None,
                      reference_method: str = GRANGER) -> SelectiveSummary:
    """Decision quality against per-dataset failure labels.

    ``decisions`` holds ``Decision`` objects or plain "recommend"/"abstain"
    strings. Failure labels describe ``reference_method``; a dataset counts
    as discouraged when the framework abstains or recommends another method
    (only knowable from ``Decision`` objects). Abstaining is read as a
    predicted failure when computing accuracy.

    - selective_fpr: P(failure | recommend)
    - abstention_precision: P(failure | abstain)
    - precision_discourage: P(failure | discouraged)
    - recall_safe: P(recommend | no failure)
    - good_abstention_rate: P(abstain | failure)
    """
    outcomes, methods = [], []
    for d in decisions:
        if isinstance(d, Decision):
            outcomes.append(d.outcome)
            methods.append(d.method)
        else:
            outcomes.append(str(d))
            methods.append(None)
    if len(outcomes) != len(failures):
        raise ValueError(f"{len(outcomes)} decisions for {len(failures)} labels")
    if not outcomes:
        raise ValueError("no decisions")
    rec = np.array([o == "recommend" for o in outcomes])
    fail = np.asarray(failures, dtype=bool)
    n = rec.size
    disc = ~rec | np.array([m is not None and m != reference_method for m in methods])
    sel_f1 = None
    if f1 is not None and rec.any():
        sel_f1 = float(np.mean(np.asarray(f1, dtype=float)[rec]))
    return SelectiveSummary(
        n=n,
        coverage=float(rec.mean()),
        failure_rate=float(fail.mean()),
        selective_fpr=_frac(int((rec & fail).sum()), int(rec.sum())),
        selective_f1=sel_f1,
        abstention_precision=_frac(int((~rec & fail).sum()), int((~rec).sum())),
        precision_discourage=_frac(int((disc & fail).sum()), int(disc.sum())),
        recall_safe=_frac(int((rec & ~fail).sum()), int((~fail).sum())),
        good_abstention_rate=_frac(int((~rec & fail).sum()), int(fail.sum())),
        overall_accuracy=float(((rec & ~fail) | (~rec & fail)).mean()),
    )


# ---------------------------------------------------------------- benchmark

SEVERE_FAMILIES = ("F2", "F3", "F4", "F5", "F9")
DEFAULT_PERIOD_HINT = 12


def stratified_split(families: Sequence[str], holdout: float = 0.2, seed: int = 0) -> tuple[list[int], list[int]]:
    """Per-family random split; returns (calibration indices, holdout indices)."""
    by_fam: dict[str, list[int]] = {}
    for i, f in enumerate(families):
        by_fam.setdefault(f, []).append(i)
    cal, hold = [], []
    for k, fam in enumerate(sorted(by_fam)):
        idx = np.array(by_fam[fam])
        perm = child_rng(seed, 77, k).permutation(idx.size)
        n_hold = int(round(holdout * idx.size))
        hold.extend(int(i) for i in idx[perm[:n_hold]])
        cal.extend(int(i) for i in idx[perm[n_hold:]])
    return sorted(cal), sorted(hold)


def severity_stratum(family: str, quantile: float) -> str:
    if family == "F1":
        return "clean"
    if family in SEVERE_FAMILIES and quantile >= 2.0 / 3.0:
        return "severe"
    return "moderate"


def _graph_f1(entry) -> float | None:
    disc = getattr(entry, "discovery", None) or {}
    sc = disc.get("score")
    return None if sc is None else float(sc["f1"])


def _benchmark_config(config: AuditConfig | None) -> AuditConfig:
    config = config or AuditConfig()
    if config.period_hint is None:
        config = replace(config, period_hint=DEFAULT_PERIOD_HINT)
    return config


def _entries(atlas) -> list:
    from .atlas import load_atlas

    return load_atlas(atlas)[0] if isinstance(atlas, (str, Path)) else list(atlas)


def audit_entries(entries: Sequence, config: AuditConfig) -> tuple[list, list[dict]]:
    """Stage I on every entry; entries the audit rejects come back as None."""
    reports, excluded = [], []
    for i, e in enumerate(entries):
        try:
            reports.append(audit(e.data, config, include_nonlinearity=False))
        except AuditError as exc:
            reports.append(None)
            excluded.append({"index": i, "family": e.spec.family, "error": type(exc).__name__})
    return reports, excluded


def split_entries(entries: Sequence, reports: Sequence, split_seed: int) -> tuple[list[int], list[int]]:
    keep = [i for i, r in enumerate(reports) if r is not None]
    cal_pos, hold_pos = stratified_split([entries[i].spec.family for i in keep], 0.2, split_seed)
    return [keep[k] for k in cal_pos], [keep[k] for k in hold_pos]


def fit_calibration(entries: Sequence, reports: Sequence, indices: Sequence[int],
                    priors: Priors | None = None, seed: int = 0) -> Calibration:
    corpus = [CorpusItem(reports[i].features, dict(entries[i].labels), entries[i].spec.family)
              for i in indices]
    return calibrate_models(corpus, priors, seed=seed)


def calibrate_atlas(atlas, config: AuditConfig | None = None, split_seed: int = 0,
                    priors: Priors | None = None) -> Calibration:
    """Fit risk models on the calibration split of an atlas.

    The split matches ``run_benchmark`` with the same ``split_seed``, so a
    calibration produced here leaves that benchmark's holdout untouched.
    """
    config = _benchmark_config(config)
    entries = _entries(atlas)
    reports, _ = audit_entries(entries, config)
    cal_idx, _ = split_entries(entries, reports, split_seed)
    cal = fit_calibration(entries, reports, cal_idx, priors, split_seed)
    return replace(cal, meta={**cal.meta, "split_seed": split_seed, "n_calibration": len(cal_idx)})


def run_benchmark(atlas, config: AuditConfig | None = None, split_seed: int = 0,
                  calibration: Calibration | None = None, priors: Priors | None = None,
                  include_runtime: bool = True) -> dict:
    """Audit every atlas entry, calibrate on 80%, and score the 20% holdout.

    ``atlas`` is a directory written by the atlas module or a list of
    entries. When ``calibration`` is given it is used as-is instead of
    being fitted on the calibration split.
    """
    config = _benchmark_config(config)
    entries = _entries(atlas)

    t0 = time.perf_counter()
    reports, excluded = audit_entries(entries, config)
    t_audit = time.perf_counter() - t0

    keep = [i for i, r in enumerate(reports) if r is not None]
    cal_idx, hold_idx = split_entries(entries, reports, split_seed)

    t0 = time.perf_counter()
    if calibration is None:
        calibration = fit_calibration(entries, reports, cal_idx, priors, split_seed)
    t_cal = time.perf_counter() - t0

    strict_cfg = replace(config, thresholds=replace(config.thresholds, strict_max_risk=0.5))
    t0 = time.perf_counter()
    profiles, decisions, strict = {}, {}, {}
    for i in keep:
        prof = compute_risk_profile(reports[i], calibration, config)
        profiles[i] = prof
        decisions[i] = decide(prof, DEFAULT_CATALOG, config)
        strict[i] = decide(prof, DEFAULT_CATALOG, strict_cfg)
    t_score = (time.perf_counter() - t0) / max(len(keep), 1)

    calib_rows = {}
    for dim in DIMENSIONS:
        pred = [profiles[i].point(dim) for i in hold_idx]
        lab = [int(entries[i].labels[dim]) for i in hold_idx]
        try:
            calib_rows[dim] = calibration_metrics(pred, lab).to_dict()
        except AuditError as exc:
            calib_rows[dim] = {"error": type(exc).__name__, "n": len(pred)}

    def sel(idx, dec):
        if not idx:
            return None
        f1 = [_graph_f1(entries[i]) for i in idx]
        f1 = None if any(v is None for v in f1) else f1
        return selective_metrics([dec[i] for i in idx], [entries[i].failure for i in idx], f1).to_dict()

    strata: dict[str, dict[str, Any]] = {}
    for name in ("clean", "moderate", "severe"):
        idx = [i for i in keep
               if severity_stratum(entries[i].spec.family, entries[i].spec.params.get("severity_quantile", 0.0)) == name]
        rec = [i for i in idx if decisions[i].recommended]
        strata[name] = {
            "n": len(idx),
            "always_run_fpr": float(np.mean([entries[i].failure for i in idx])) if idx else None,
            "selective_fpr": float(np.mean([entries[i].failure for i in rec])) if rec else None,
            "abstention_rate": 1.0 - len(rec) / len(idx) if idx else None,
        }

    per_family = {}
    for fam in sorted({entries[i].spec.family for i in keep}, key=lambda f: int(f[1:])):
        idx = [i for i in keep if entries[i].spec.family == fam]
        per_family[fam] = {
            "n": len(idx),
            "failure_rate": float(np.mean([entries[i].failure for i in idx])),
            "coverage": float(np.mean([decisions[i].recommended for i in idx])),
            "mean_risk": {d: float(np.mean([profiles[i].point(d) for i in idx])) for d in DIMENSIONS},
        }

    report: dict[str, Any] = {
        "split": {"seed": split_seed, "n_calibration": len(cal_idx), "n_holdout": len(hold_idx),
                  "excluded": excluded},
        "calibration": calib_rows,
        "selective": sel(hold_idx, decisions),
        "selective_strict": sel(hold_idx, strict),
        "selective_atlas": sel(keep, decisions),
        "selective_atlas_strict": sel(keep, strict),
        "strata": strata,
        "per_family": per_family,
        "fixtures": evaluate_fixtures(DEFAULT_CATALOG, config),
        "calibration_model": calibration.to_dict(),
    }
    if include_runtime:
        report["runtime"] = {"audit_total_s": t_audit, "audit_mean_s": t_audit / max(len(entries), 1),
                             "calibrate_s": t_cal, "risk_and_decide_mean_s": t_score}
    return report


def write_bins_csv(report: Mapping, path: str | Path) -> None:
    """Reliability-diagram rows for every dimension of a benchmark report."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["dimension", "bin", "lo", "hi", "mean_predicted", "empirical", "count"])
        for dim, row in report["calibration"].items():
            for b in row.get("bins", []):
                w.writerow([dim, b["bin"], repr(b["lo"]), repr(b["hi"]), repr(b["mean_predicted"]),
                            repr(b["empirical"]), b["count"]])
