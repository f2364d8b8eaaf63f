"""Stage III: admissibility, selection, mandatory abstention and fixtures."""
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tsaudit.core import AbstentionThresholds, AuditConfig
from tsaudit.decision import (DEFAULT_CATALOG, GRANGER, PCMCI_PLUS, Decision, MethodSpec,
                              abstention_threshold, admissible_methods, catalog_from_config,
                              composite_risk, decide)
from tsaudit.errors import EmptyCatalog, ZeroDenominator
from tsaudit.fixtures import FIXTURES, evaluate_fixtures
from tsaudit.risk import RiskProfile

CAT = {m.name: m for m in DEFAULT_CATALOG}


def prof(*r, ratio=0.9, width=0.0):
    return RiskProfile.from_points(r, t_eff_ratio=ratio, widths=width)


class TestThreshold:
    def test_default_utilities(self):
        assert abstention_threshold(1, 4, 0.5) == pytest.approx(0.3)

    def test_limits(self):
        assert abstention_threshold(1, 1e9, 0) < 1e-8
        assert abstention_threshold(1, 0, 0) == 1.0

    def test_zero_denominator(self):
        with pytest.raises(ZeroDenominator):
            abstention_threshold(0, 0, 0)


class TestComposite:
    def test_hard_dims_only(self):
        assert composite_risk(prof(0.2, 0.5, 0.1, 0.3), CAT[GRANGER]) == 0.5
        assert composite_risk(prof(0.12, 0.18, 0.01, 1.0), CAT[PCMCI_PLUS]) == 0.12
        assert composite_risk(prof(0, 0, 0, 0), CAT[GRANGER]) == 0


class TestAdmissible:
    def test_clean(self):
        a = admissible_methods(prof(0.14, 0.18, 0.01, 0.10), DEFAULT_CATALOG)
        assert set(a) == {GRANGER, PCMCI_PLUS} and not any(a.values())

    def test_confounded(self):
        a = admissible_methods(prof(0.12, 0.18, 0.01, 1.0), DEFAULT_CATALOG)
        assert set(a) == {PCMCI_PLUS}
        assert [w["dimension"] for w in a[PCMCI_PLUS]] == ["confound"]

    def test_nonstationary(self):
        assert admissible_methods(prof(1.0, 0.18, 1.0, 1.0), DEFAULT_CATALOG) == {}

    def test_empty_catalog(self):
        with pytest.raises(EmptyCatalog):
            admissible_methods(prof(0, 0, 0, 0), [])


class TestDecide:
    def test_a1(self):
        d = decide(prof(0.14, 0.18, 0.01, 0.10))
        assert (d.outcome, d.method) == ("recommend", GRANGER)

    def test_c1(self):
        d = decide(prof(1.0, 0.18, 1.0, 1.0))
        assert d.outcome == "abstain" and "catastrophic_nonstationarity" in d.reasons

    def test_a2c(self):
        d = decide(prof(0.21, 0.38, 1.0, 1.0))
        assert d.method == PCMCI_PLUS
        soft = {w["dimension"] for w in d.warnings if w["kind"] == "soft_constraint"}
        assert soft == {"persist", "confound"}

    def test_low_teff_and_wide_interval(self):
        assert "insufficient_effective_sample_size" in decide(prof(0.1, 0.1, 0.1, 0.1, ratio=0.2)).reasons
        assert "high_uncertainty" in decide(prof(0.3, 0.1, 0.1, 0.1, width=0.6)).reasons

    def test_strict_policy(self):
        cfg = AuditConfig(thresholds=AbstentionThresholds(strict_max_risk=0.5))
        assert decide(prof(0.12, 0.18, 0.01, 1.0), config=cfg).outcome == "abstain"

    def test_json(self):
        obj = decide(prof(0.14, 0.18, 0.01, 0.10)).to_json_dict()
        assert obj["decision"] == "recommend" and obj["thresholds"]["theta_abstain"] == pytest.approx(0.3)

    def test_decision_invariants(self):
        with pytest.raises(ValueError):
            Decision("abstain", None, 0.0)
        with pytest.raises(ValueError):
            Decision("recommend", None, 1.0)

    def test_disabled_catalog(self):
        with pytest.raises(EmptyCatalog):
            decide(prof(0, 0, 0, 0), [m for m in DEFAULT_CATALOG if not m.enabled])

    def test_catalog_from_config(self):
        doc = {"methods": [{"name": "X", "composite": 0.5,
                            "constraints": {"nonstat": {"threshold": 0.4, "kind": "hard"}}}]}
        (m,) = catalog_from_config(doc)
        assert m.hard_dims() == ["nonstat"]
        assert MethodSpec.from_dict(m.to_dict()) == m
        assert catalog_from_config(None) == DEFAULT_CATALOG


risk = st.floats(0, 1)


class TestProperties:
    @given(st.tuples(risk, risk, risk, risk), st.integers(0, 3), st.floats(0, 1))
    def test_monotone_abstention(self, r, k, bump):
        d0 = decide(prof(*r))
        raised = list(r)
        raised[k] = min(1.0, raised[k] + bump)
        if d0.outcome == "abstain":
            assert decide(prof(*raised)).outcome == "abstain"

    @given(st.tuples(risk, risk, risk, risk), st.floats(0, 1))
    def test_pure_and_explained(self, r, ratio):
        d = decide(prof(*r, ratio=ratio))
        assert d == decide(prof(*r, ratio=ratio))
        if d.outcome == "abstain":
            assert d.reasons
        else:
            m = CAT[d.method]
            soft = [k for k, c in m.constraints.items() if not c.hard and r[("nonstat", "irreg", "persist", "confound").index(k)] > c.threshold]
            if soft:
                assert d.warnings


class TestFixtures:
    def test_all_21(self):
        res = evaluate_fixtures()
        assert res["total"] == 21
        assert res["passed"] == 21, [r for r in res["rows"] if not r["ok"]]

    def test_shape(self):
        assert sum(f.expects_warning for f in FIXTURES) == 4
        assert sum(f.expected == "abstain" for f in FIXTURES) == 6
