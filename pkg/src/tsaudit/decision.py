"""Stage III: method admissibility, selection and mandatory abstention."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .core import AbstentionThresholds, AuditConfig
from .errors import EmptyCatalog, ZeroDenominator
from .risk import DIMENSIONS, RiskProfile

GRANGER = "Granger"
PCMCI_PLUS = "PCMCI+"


@dataclass(frozen=True)
class Constraint:
    threshold: float
    hard: bool

    def __post_init__(self) -> None:
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError(f"threshold {self.threshold} outside [0, 1]")


@dataclass(frozen=True)
class MethodSpec:
    name: str
    composite: float | None
    constraints: Mapping[str, Constraint]
    enabled: bool = True

    def hard_dims(self) -> list[str]:
        return [d for d in DIMENSIONS if d in self.constraints and self.constraints[d].hard]

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "composite": self.composite,
            "enabled": self.enabled,
            "constraints": {d: {"threshold": c.threshold, "kind": "hard" if c.hard else "soft"}
                            for d, c in self.constraints.items()},
        }

    @classmethod
    def from_dict(cls, obj: Mapping) -> "MethodSpec":
        cons = {d: Constraint(float(c["threshold"]), str(c.get("kind", "soft")).lower() == "hard")
                for d, c in obj["constraints"].items()}
        unknown = set(cons) - set(DIMENSIONS)
        if unknown:
            raise ValueError(f"{obj['name']}: unknown dimensions {sorted(unknown)}")
        comp = obj.get("composite")
        return cls(str(obj["name"]), None if comp is None else float(comp), cons,
                   bool(obj.get("enabled", True)))


def _m(name, comp, nonstat, irreg, confound, persist, enabled=True) -> MethodSpec:
    cons = {"nonstat": Constraint(*nonstat), "irreg": Constraint(*irreg),
            "confound": Constraint(*confound), "persist": Constraint(*persist)}
    return MethodSpec(name, comp, cons, enabled)


H, S = True, False
DEFAULT_CATALOG: tuple[MethodSpec, ...] = (
    _m(GRANGER, 0.30, (0.60, H), (0.50, H), (0.60, H), (0.75, S)),
    _m(PCMCI_PLUS, 0.70, (0.80, H), (0.60, S), (0.80, S), (0.85, S)),
    # listed for completeness; not wired into the pipeline yet
    _m("LPCMCI", 0.80, (0.80, H), (0.70, S), (0.90, S), (0.85, S), enabled=False),
    _m("TransferEntropy", 0.90, (0.85, S), (0.80, S), (0.95, S), (0.90, S), enabled=False),
)


def catalog_from_config(doc: Mapping | None) -> tuple[MethodSpec, ...]:
    if not doc or "methods" not in doc:
        return DEFAULT_CATALOG
    return tuple(MethodSpec.from_dict(m) for m in doc["methods"])


def abstention_threshold(u_plus: float, u_minus: float, u_abstain: float) -> float:
    """Risk level below which running a method beats abstaining in expectation."""
    if min(u_plus, u_minus, u_abstain) < 0:
        raise ValueError("utilities must be non-negative")
    den = u_plus + u_minus
    if den <= 0:
        raise ZeroDenominator("u_plus + u_minus must be positive")
    return min(max((u_plus + u_abstain) / den, 0.0), 1.0)


def composite_risk(profile: RiskProfile, method: MethodSpec) -> float:
    """Worst point risk over the method's hard-constrained dimensions."""
    return max((profile.point(d) for d in method.hard_dims()), default=0.0)


def _soft_warnings(profile: RiskProfile, m: MethodSpec) -> list[dict]:
    out = []
    for d in DIMENSIONS:
        c = m.constraints.get(d)
        if c is not None and not c.hard and profile.point(d) > c.threshold:
            out.append({"kind": "soft_constraint", "method": m.name, "dimension": d,
                        "risk": profile.point(d), "threshold": c.threshold})
    return out


def _exclusions(profile: RiskProfile, m: MethodSpec, theta: float) -> list[dict]:
    out = []
    for d in m.hard_dims():
        c = m.constraints[d]
        if profile.point(d) > c.threshold:
            out.append({"kind": "hard_constraint", "method": m.name, "dimension": d,
                        "risk": profile.point(d), "threshold": c.threshold})
    comp_thr = theta if m.composite is None else m.composite
    comp = composite_risk(profile, m)
    if comp > comp_thr:
        worst = max(m.hard_dims(), key=profile.point)
        out.append({"kind": "composite", "method": m.name, "dimension": worst,
                    "risk": comp, "threshold": comp_thr})
    return out


def admissible_methods(profile: RiskProfile, catalog: Sequence[MethodSpec],
                       theta: float | None = None) -> dict[str, list[dict]]:
    """Enabled methods passing every hard constraint and the composite gate.

    Maps each admissible method name to its soft-constraint warnings.
    """
    if not catalog:
        raise EmptyCatalog("method catalog is empty")
    theta = 1.0 if theta is None else theta
    return {m.name: _soft_warnings(profile, m) for m in catalog
            if m.enabled and not _exclusions(profile, m, theta)}


@dataclass(frozen=True)
class Decision:
    outcome: str  # "recommend" | "abstain"
    method: str | None
    confidence: float
    warnings: tuple = ()
    reasons: tuple = ()
    thresholds: Mapping = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.outcome not in ("recommend", "abstain"):
            raise ValueError(self.outcome)
        if self.outcome == "abstain" and not self.reasons:
            raise ValueError("abstention needs at least one reason")
        if self.outcome == "recommend" and not self.method:
            raise ValueError("recommendation needs a method")

    @property
    def recommended(self) -> bool:
        return self.outcome == "recommend"

    def to_json_dict(self) -> dict:
        return {
            "decision": self.outcome,
            "method": self.method,
            "confidence": self.confidence,
            "warnings": [dict(w) for w in self.warnings],
            "reasons": list(self.reasons),
            "thresholds": dict(self.thresholds),
        }


def decide(profile: RiskProfile, catalog: Sequence[MethodSpec] = DEFAULT_CATALOG,
           config: AuditConfig | None = None) -> Decision:
    """Apply the mandatory abstention checks, then pick a method."""
    if not catalog:
        raise EmptyCatalog("method catalog is empty")
    config = config or AuditConfig()
    th: AbstentionThresholds = config.thresholds
    theta = abstention_threshold(config.u_plus, config.u_minus, config.u_abstain)
    enabled = [m for m in catalog if m.enabled]
    if not enabled:
        raise EmptyCatalog("no enabled methods in catalog")

    r = {d: profile.point(d) for d in DIMENSIONS}
    reasons: list[str] = []
    if profile.t_eff_ratio < th.min_teff_ratio:
        reasons.append("insufficient_effective_sample_size")
    if any(profile.dims[d].width > th.max_interval_width for d in DIMENSIONS):
        reasons.append("high_uncertainty")
    if r["nonstat"] > th.catastrophic_nonstat:
        reasons.append("catastrophic_nonstationarity")
    if r["nonstat"] > th.compound_nonstat and r["confound"] > th.compound_confound:
        reasons.append("compound_nonstationarity_confounding")
    if all(composite_risk(profile, m) > th.catastrophic_composite for m in enabled):
        reasons.append("catastrophic_composite_risk")
    if th.strict_max_risk is not None and max(r.values()) >= th.strict_max_risk:
        reasons.append("strict_policy_max_risk")

    admissible = admissible_methods(profile, enabled, theta)
    conf = {name: 1.0 - composite_risk(profile, m) for m in enabled
            for name in [m.name] if name in admissible}
    candidates = [m for m in enabled if m.name in admissible and conf[m.name] > th.min_confidence]
    if not admissible:
        reasons.append("no_admissible_method")
    elif not candidates:
        reasons.append("low_confidence")

    thresholds = {"theta_abstain": theta, **{k: v for k, v in vars(th).items()}}
    best_conf = max(conf.values(), default=0.0)
    if reasons:
        return Decision("abstain", None, best_conf, (), tuple(reasons), thresholds)

    names = [m.name for m in candidates]
    if r["persist"] > th.persist_prefers_pcmci and PCMCI_PLUS in names:
        choice = PCMCI_PLUS
    elif GRANGER in names:
        choice = GRANGER
    else:
        # lowest composite; catalog order breaks ties
        choice = min(candidates, key=lambda m: composite_risk(profile, m)).name
    warnings = list(admissible[choice])
    for m in enabled:
        if m.name not in admissible:
            for ex in _exclusions(profile, m, theta):
                warnings.append({**ex, "kind": f"method_excluded:{ex['kind']}"})
    return Decision("recommend", choice, conf[choice], tuple(warnings), (), thresholds)
