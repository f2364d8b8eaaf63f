"""Stage II: logistic risk scores, isotonic calibration and bootstrap intervals."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy import optimize

from . import kernels
from .core import AuditConfig, child_rng
from .errors import (
    InsufficientLabels,
    InvalidTeff,
    MissingFeature,
    NonConvergence,
)

DIMENSIONS = ("nonstat", "irreg", "persist", "confound")


def sigmoid(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    ez = math.exp(z)
    return ez / (1.0 + ez)


@dataclass(frozen=True)
class LogisticRiskModel:
    dimension: str
    intercept: float
    weights: Mapping[str, float]
    family_offsets: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        vals = [self.intercept, *self.weights.values(), *self.family_offsets.values()]
        if not all(math.isfinite(v) for v in vals):
            raise ValueError(f"{self.dimension}: non-finite parameter")

    @property
    def feature_names(self) -> tuple[str, ...]:
        return tuple(self.weights)

    def ledger(self, features: Mapping[str, float]) -> list[tuple[str, float]]:
        """Per-feature contributions ``w_j * x_j``, largest magnitude first."""
        try:
            items = [(k, w * float(features[k])) for k, w in self.weights.items()]
        except KeyError as exc:
            raise MissingFeature(f"{self.dimension} model needs feature {exc.args[0]!r}") from None
        return sorted(items, key=lambda kv: -abs(kv[1]))

    def linear_predictor(self, features: Mapping[str, float]) -> float:
        return self.intercept + math.fsum(c for _, c in self.ledger(features))

    def to_dict(self) -> dict:
        return {
            "intercept": float(self.intercept),
            "weights": {k: float(v) for k, v in self.weights.items()},
            "family_offsets": {k: float(v) for k, v in self.family_offsets.items()},
        }

    @classmethod
    def from_dict(cls, dimension: str, obj: Mapping) -> "LogisticRiskModel":
        return cls(dimension, float(obj["intercept"]), dict(obj["weights"]),
                   dict(obj.get("family_offsets") or {}))


def default_models() -> dict[str, LogisticRiskModel]:
    """Expert-initialized weights before calibration."""
    return {
        "nonstat": LogisticRiskModel(
            "nonstat", -2.0, {"x_break_mag": 1.0, "x_drift": 2.0, "x_adf": 0.5, "x_kpss": 0.5}
        ),
        "irreg": LogisticRiskModel(
            "irreg", -1.5, {"x_gap_cv": 2.5, "x_missing": 2.0, "x_seasonal_miss": 1.5}
        ),
        "persist": LogisticRiskModel("persist", -1.5, {"x_teff_ratio": -3.0, "x_tau_int": 2.0}),
        "confound": LogisticRiskModel(
            "confound", -6.5, {"x_chow": 2.0, "x_resid_var": 1.8, "x_vif": 0.5}
        ),
    }


def logistic_risk(features: Mapping[str, float], model: LogisticRiskModel) -> float:
    """sigma(intercept + sum_j w_j x_j)."""
    return sigmoid(model.linear_predictor(features))


@dataclass(frozen=True)
class IsotonicMap:
    breakpoints: tuple[float, ...]
    values: tuple[float, ...]
    degenerate: bool = False

    def __post_init__(self) -> None:
        b = np.asarray(self.breakpoints, float)
        v = np.asarray(self.values, float)
        if b.size == 0 or b.size != v.size:
            raise ValueError("isotonic map needs matching, nonempty breakpoints and values")
        if np.any(np.diff(b) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        if np.any(np.diff(v) < 0) or v.min() < 0 or v.max() > 1:
            raise ValueError("fitted values must be nondecreasing in [0, 1]")

    @classmethod
    def identity(cls) -> "IsotonicMap":
        return cls((0.0, 1.0), (0.0, 1.0))

    def __call__(self, raw):
        return apply_isotonic(self, raw)

    def to_dict(self) -> dict:
        return {"breakpoints": list(map(float, self.breakpoints)),
                "values": list(map(float, self.values)),
                "degenerate": bool(self.degenerate)}

    @classmethod
    def from_dict(cls, obj: Mapping) -> "IsotonicMap":
        return cls(tuple(obj["breakpoints"]), tuple(obj["values"]), bool(obj.get("degenerate", False)))


def fit_isotonic(scores: Sequence[float], labels: Sequence[int]) -> IsotonicMap:
    """Exact least-squares monotone fit (PAVA); tied scores are pooled first."""
    s = np.asarray(scores, dtype=float).ravel()
    y = np.asarray(labels, dtype=float).ravel()
    if s.size != y.size or s.size < 2:
        raise ValueError("scores and labels need equal length >= 2")
    if not np.all(np.isin(y, (0.0, 1.0))):
        raise ValueError("labels must be 0/1")
    uniq, inv, counts = np.unique(s, return_inverse=True, return_counts=True)
    sums = np.bincount(inv, weights=y)
    fitted = kernels.pava(sums / counts, counts.astype(float))
    fitted = np.clip(fitted, 0.0, 1.0)
    return IsotonicMap(tuple(uniq.tolist()), tuple(fitted.tolist()), degenerate=bool(np.ptp(y) == 0))


def apply_isotonic(imap: IsotonicMap, raw):
    """Linear interpolation between breakpoints, clamped at both ends."""
    out = np.interp(raw, imap.breakpoints, imap.values)
    return float(out) if np.ndim(out) == 0 else out


def inflated_interval(mean: float, sd: float, T: float, t_eff: float) -> tuple[float, float]:
    """95% interval around ``mean`` with the spread widened by sqrt(T/T_eff), clipped to [0, 1]."""
    if not (0.0 < t_eff <= T):
        raise InvalidTeff(f"need 0 < T_eff <= T, got T_eff={t_eff}, T={T}")
    half = 1.96 * sd * math.sqrt(T / t_eff)
    return max(0.0, mean - half), min(1.0, mean + half)


def bootstrap_interval(features: Mapping[str, float], model: LogisticRiskModel, imap: IsotonicMap,
                       T: float, t_eff: float, B: int = 100, seed: int = 0,
                       return_draws: bool = False):
    """Parametric bootstrap of the calibrated risk with sqrt(T/T_eff) inflation.

    Returns ``(mean, lo, hi)``.
    """
    if not (0.0 < t_eff <= T):
        raise InvalidTeff(f"need 0 < T_eff <= T, got T_eff={t_eff}, T={T}")
    if B < 2:
        raise ValueError("bootstrap needs B >= 2")
    names = model.feature_names
    try:
        x = np.array([float(features[k]) for k in names])
    except KeyError as exc:
        raise MissingFeature(f"{model.dimension} model needs feature {exc.args[0]!r}") from None
    w = np.array([model.weights[k] for k in names])
    rng = np.random.default_rng(seed)
    sd = np.maximum(0.1 * np.abs(x), 0.05)
    xt = np.clip(x + rng.standard_normal((B, x.size)) * sd, 0.0, 1.0)
    z = model.intercept + xt @ w
    raw = 1.0 / (1.0 + np.exp(-z))
    cal = np.asarray(apply_isotonic(imap, raw), dtype=float)
    mean = float(cal.mean())
    lo, hi = inflated_interval(mean, float(cal.std(ddof=1)), T, t_eff)
    if return_draws:
        return mean, lo, hi, cal
    return mean, lo, hi


@dataclass(frozen=True)
class DimensionRisk:
    risk: float
    lo: float
    hi: float
    raw: float
    bootstrap_mean: float
    linear_predictor: float
    intercept: float
    ledger: tuple[tuple[str, float], ...]

    @property
    def width(self) -> float:
        return self.hi - self.lo


@dataclass(frozen=True)
class RiskProfile:
    dims: Mapping[str, DimensionRisk]
    t_eff_ratio: float

    def __post_init__(self) -> None:
        missing = set(DIMENSIONS) - set(self.dims)
        if missing:
            raise ValueError(f"risk profile missing dimensions {sorted(missing)}")
        for k, d in self.dims.items():
            if not (0.0 <= d.lo <= d.risk <= d.hi <= 1.0):
                raise ValueError(f"{k}: interval [{d.lo}, {d.hi}] must contain risk {d.risk}")

    def point(self, dim: str) -> float:
        return self.dims[dim].risk

    def as_vector(self) -> tuple[float, float, float, float]:
        return tuple(self.dims[k].risk for k in DIMENSIONS)  # type: ignore[return-value]

    @classmethod
    def from_points(cls, risks: Sequence[float], t_eff_ratio: float = 1.0,
                    widths: Sequence[float] | float = 0.0) -> "RiskProfile":
        """Profile from literal point risks (fixtures, ``decide`` subcommand)."""
        if isinstance(widths, (int, float)):
            widths = [float(widths)] * 4
        dims = {}
        for k, r, wd in zip(DIMENSIONS, risks, widths):
            lo, hi = max(0.0, r - wd / 2), min(1.0, r + wd / 2)
            dims[k] = DimensionRisk(float(r), lo, hi, float(r), float(r), math.nan, math.nan, ())
        return cls(dims, float(t_eff_ratio))

    def to_json_dict(self) -> dict:
        out: dict = {}
        for k in DIMENSIONS:
            d = self.dims[k]
            out[k] = {
                "risk": d.risk,
                "lo": d.lo,
                "hi": d.hi,
                "raw": d.raw,
                "bootstrap_mean": d.bootstrap_mean,
                "intercept": None if math.isnan(d.intercept) else d.intercept,
                "linear_predictor": None if math.isnan(d.linear_predictor) else d.linear_predictor,
                "ledger": [{"feature": f, "contribution": c} for f, c in d.ledger],
            }
        out["t_eff_ratio"] = self.t_eff_ratio
        return out

    @classmethod
    def from_json_dict(cls, obj: Mapping) -> "RiskProfile":
        dims = {}
        for k in DIMENSIONS:
            d = obj[k]
            r = float(d["risk"])
            lo = float(d.get("lo", r))
            hi = float(d.get("hi", r))
            ledger = tuple((e["feature"], float(e["contribution"])) for e in d.get("ledger", []))
            lp = d.get("linear_predictor")
            ic = d.get("intercept")
            dims[k] = DimensionRisk(r, lo, hi, float(d.get("raw", r)), float(d.get("bootstrap_mean", r)),
                                    math.nan if lp is None else float(lp),
                                    math.nan if ic is None else float(ic), ledger)
        return cls(dims, float(obj.get("t_eff_ratio", 1.0)))


@dataclass(frozen=True)
class Calibration:
    models: Mapping[str, LogisticRiskModel]
    maps: Mapping[str, IsotonicMap]
    meta: Mapping = field(default_factory=dict)

    @classmethod
    def default(cls) -> "Calibration":
        return cls(default_models(), {k: IsotonicMap.identity() for k in DIMENSIONS},
                   {"source": "expert initialization, identity isotonic maps"})

    def to_dict(self) -> dict:
        return {
            "models": {k: m.to_dict() for k, m in self.models.items()},
            "isotonic": {k: m.to_dict() for k, m in self.maps.items()},
            "meta": dict(self.meta),
        }

    @classmethod
    def from_dict(cls, obj: Mapping) -> "Calibration":
        models = {k: LogisticRiskModel.from_dict(k, v) for k, v in obj["models"].items()}
        maps = {k: IsotonicMap.from_dict(v) for k, v in obj["isotonic"].items()}
        return cls(models, maps, dict(obj.get("meta") or {}))

    def save_yaml(self, path) -> None:
        import yaml

        with open(path, "w") as fh:
            yaml.safe_dump({"calibration": self.to_dict()}, fh, sort_keys=False)

    @classmethod
    def load_yaml(cls, path) -> "Calibration":
        import yaml

        with open(path) as fh:
            doc = yaml.safe_load(fh) or {}
        return cls.from_dict(doc.get("calibration", doc))


def score_dimension(features: Mapping[str, float], model: LogisticRiskModel, imap: IsotonicMap,
                    T: float, t_eff: float, B: int, seed: int) -> DimensionRisk:
    ledger = tuple(model.ledger(features))
    z = model.intercept + math.fsum(c for _, c in ledger)
    raw = sigmoid(z)
    point = float(apply_isotonic(imap, raw))
    mean, lo, hi = bootstrap_interval(features, model, imap, T, t_eff, max(B, 2), seed)
    # the interval is centred on the bootstrap mean; widen to cover the point estimate
    lo, hi = min(lo, point), max(hi, point)
    return DimensionRisk(point, lo, hi, raw, mean, z, model.intercept, ledger)


def compute_risk_profile(report, calibration: Calibration | None = None,
                         config: AuditConfig | None = None) -> RiskProfile:
    """Score a diagnostic report on all four dimensions."""
    calibration = calibration or Calibration.default()
    config = config or AuditConfig()
    feats = report.features
    T = float(report.T)
    t_eff = float(report.persistence.t_eff)
    dims = {}
    for i, k in enumerate(DIMENSIONS):
        seed = int(child_rng(config.seed, 1000 + i).integers(2**63 - 1))
        dims[k] = score_dimension(feats, calibration.models[k], calibration.maps[k], T, t_eff,
                                  config.n_bootstrap, seed)
    return RiskProfile(dims, float(report.persistence.t_eff_ratio))


# calibration ---------------------------------------------------------------

@dataclass(frozen=True)
class Priors:
    weight_sd: float = 2.0
    intercept_sd: float = 5.0
    family_sd: float = 0.5


@dataclass(frozen=True)
class CorpusItem:
    features: Mapping[str, float]
    label: bool | Mapping[str, bool]
    family: str

    def label_for(self, dim: str) -> int:
        lab = self.label
        if isinstance(lab, Mapping):
            return int(bool(lab[dim]))
        return int(bool(lab))


def _fit_map(X: np.ndarray, y: np.ndarray, fam: np.ndarray, n_fam: int, init: np.ndarray,
             priors: Priors, prior_mean: np.ndarray, tol: float, maxiter: int) -> np.ndarray:
    p = X.shape[1]
    # params: [intercept, weights..., family offsets...]
    prior_sd = np.concatenate([[priors.intercept_sd], np.full(p, priors.weight_sd),
                               np.full(n_fam, priors.family_sd)])
    mean = np.concatenate([[0.0], prior_mean, np.zeros(n_fam)])
    prec = 1.0 / prior_sd**2

    def nlp(theta):
        a, w, off = theta[0], theta[1 : p + 1], theta[p + 1 :]
        z = a + X @ w + off[fam]
        ll = np.sum(y * z - np.logaddexp(0.0, z))
        d = theta - mean
        val = -ll + 0.5 * float(np.sum(prec * d * d))
        r = y - 1.0 / (1.0 + np.exp(-z))
        g = np.empty_like(theta)
        g[0] = -r.sum()
        g[1 : p + 1] = -(X.T @ r)
        g[p + 1 :] = -np.bincount(fam, weights=r, minlength=n_fam)
        g += prec * d
        return val, g

    res = optimize.minimize(nlp, init, jac=True, method="L-BFGS-B",
                            options={"maxiter": maxiter, "gtol": tol * 1e-2, "ftol": 1e-15})
    gnorm = float(np.max(np.abs(nlp(res.x)[1])))
    if gnorm > tol:
        raise NonConvergence(f"gradient norm {gnorm:.3g} above {tol} after {res.nit} iterations")
    return res.x


def calibrate_models(corpus: Sequence[CorpusItem], priors: Priors | None = None, seed: int = 0,
                     base: Mapping[str, LogisticRiskModel] | None = None, tol: float = 1e-5,
                     maxiter: int = 5000, prior_centre: str = "zero") -> Calibration:
    """Penalized maximum-likelihood refit of the four models plus isotonic maps.

    Each dimension gets Gaussian penalties on its intercept, weights and
    per-family intercept offsets; optimization starts from ``base``
    (expert weights by default). Offsets are fitted but not used when
    scoring new data. ``seed`` is recorded only; the fit is deterministic.
    """
    priors = priors or Priors()
    base = dict(base or default_models())
    if len(corpus) < 50:
        raise InsufficientLabels(f"corpus of {len(corpus)} < 50 items")
    families = sorted({c.family for c in corpus})
    fam_idx = {f: i for i, f in enumerate(families)}
    fam = np.array([fam_idx[c.family] for c in corpus])
    models, maps = {}, {}
    for dim in DIMENSIONS:
        m0 = base[dim]
        names = m0.feature_names
        X = np.array([[float(c.features[k]) for k in names] for c in corpus])
        y = np.array([c.label_for(dim) for c in corpus], dtype=float)
        if y.min() == y.max():
            raise InsufficientLabels(f"{dim}: only one label class in corpus")
        init = np.concatenate([[m0.intercept], [m0.weights[k] for k in names], np.zeros(len(families))])
        centre = init[1 : len(names) + 1] if prior_centre == "expert" else np.zeros(len(names))
        theta = _fit_map(X, y, fam, len(families), init, priors, centre, tol, maxiter)
        model = LogisticRiskModel(
            dim, float(theta[0]), {k: float(v) for k, v in zip(names, theta[1 : len(names) + 1])},
            {f: float(theta[len(names) + 1 + i]) for f, i in fam_idx.items()},
        )
        raw = np.array([logistic_risk(c.features, model) for c in corpus])
        models[dim] = model
        maps[dim] = fit_isotonic(raw, y.astype(int))
    meta = {"n_items": len(corpus), "families": families, "seed": int(seed),
            "priors": {"weight_sd": priors.weight_sd, "intercept_sd": priors.intercept_sd,
                       "family_sd": priors.family_sd, "centre": prior_centre}}
    return Calibration(models, maps, meta)


def labels_from(items: Iterable[CorpusItem], dim: str) -> np.ndarray:
    return np.array([c.label_for(dim) for c in items], dtype=int)
