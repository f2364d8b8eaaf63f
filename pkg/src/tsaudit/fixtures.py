"""Reference external-benchmark risk profiles with their expected decisions.

Each row is (id, description, (nonstat, irreg, persist, confound), expected,
expects_warning). The profiles carry point risks only; they are scored with
a zero-width interval and an effective-sample ratio of 0.9, since the
source tables report neither.
"""
from __future__ import annotations

from dataclasses import dataclass

from .core import AuditConfig
from .decision import DEFAULT_CATALOG, Decision, decide
from .risk import RiskProfile

FIXTURE_TEFF_RATIO = 0.9


@dataclass(frozen=True)
class Fixture:
    id: str
    description: str
    risks: tuple[float, float, float, float]
    expected: str
    expects_warning: bool = False

    def profile(self) -> RiskProfile:
        return RiskProfile.from_points(self.risks, t_eff_ratio=FIXTURE_TEFF_RATIO)


FIXTURES: tuple[Fixture, ...] = (
    Fixture("A1", "linear, clean", (0.14, 0.18, 0.01, 0.10), "recommend"),
    Fixture("A1C", "linear + confounder", (0.07, 0.18, 0.01, 0.12), "recommend"),
    Fixture("A2", "multivariate linear", (0.14, 0.18, 0.06, 1.00), "recommend"),
    Fixture("A2C", "multivariate + confounder", (0.21, 0.38, 1.00, 1.00), "recommend", True),
    Fixture("B1", "polynomial nonlinear", (0.07, 0.18, 0.14, 1.00), "recommend"),
    Fixture("B1C", "nonlinear + confounder", (0.07, 0.18, 0.16, 1.00), "recommend"),
    Fixture("B2", "mixed noise, irregular", (0.16, 0.38, 0.01, 0.06), "recommend", True),
    Fixture("B2C", "B2 + confounder", (0.13, 0.38, 0.01, 0.08), "recommend"),
    Fixture("C1", "trend + seasonality", (1.00, 0.18, 1.00, 1.00), "abstain"),
    Fixture("C1C", "C1 + confounder", (1.00, 0.18, 1.00, 1.00), "abstain"),
    Fixture("C2", "C1 + irregular time", (1.00, 0.38, 1.00, 1.00), "abstain"),
    Fixture("C2C", "C2 + confounder", (1.00, 0.38, 1.00, 1.00), "abstain"),
    Fixture("D1", "MCAR 10%", (0.14, 0.18, 0.02, 0.07), "recommend"),
    Fixture("D1C", "MCAR + confounder", (0.09, 0.18, 0.02, 0.61), "recommend"),
    Fixture("D2", "block missingness", (0.24, 0.38, 0.01, 0.29), "recommend", True),
    Fixture("D2C", "block + confounder", (0.21, 0.38, 0.01, 0.28), "recommend", True),
    Fixture("D3", "mixed extreme", (1.00, 0.38, 1.00, 1.00), "abstain"),
    Fixture("D3C", "D3 + confounder", (1.00, 0.38, 1.00, 1.00), "abstain"),
    Fixture("PM2.5", "T=40, N=36", (0.12, 0.18, 0.01, 1.00), "recommend"),
    Fixture("Traffic", "T=40, N=20", (0.12, 0.18, 0.01, 1.00), "recommend"),
    Fixture("Medical", "T=40, N=20", (0.12, 0.18, 0.01, 1.00), "recommend"),
)


def fixture_ok(fx: Fixture, d: Decision) -> bool:
    if d.outcome != fx.expected:
        return False
    if fx.expects_warning and not d.warnings:
        return False
    if fx.expected == "abstain" and "catastrophic_nonstationarity" not in d.reasons:
        return False
    return True


def evaluate_fixtures(catalog=DEFAULT_CATALOG, config: AuditConfig | None = None) -> dict:
    """Run every fixture through ``decide`` and score it against expectations."""
    rows = []
    for fx in FIXTURES:
        d = decide(fx.profile(), catalog, config)
        rows.append({"id": fx.id, "expected": fx.expected, "decision": d.outcome, "method": d.method,
                     "n_warnings": len(d.warnings), "reasons": list(d.reasons), "ok": fixture_ok(fx, d)})
    return {"passed": sum(r["ok"] for r in rows), "total": len(rows), "rows": rows}
