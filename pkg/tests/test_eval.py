"""Calibration and selective metrics, and the benchmark harness."""
import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from tsaudit.atlas import generate_atlas
from tsaudit.decision import Decision
from tsaudit.errors import LowSample, SingleClass
from tsaudit.eval import (auroc, calibration_metrics, expected_calibration_error,
                          logistic_recalibration, run_benchmark, selective_metrics,
                          severity_stratum, stratified_split, write_bins_csv)


class TestCalibrationMetrics:
    def test_perfect(self):
        y = np.array([0, 1] * 15)
        m = calibration_metrics(y.astype(float), y)
        assert m.ece == pytest.approx(0, abs=1e-5) and m.brier == pytest.approx(0, abs=1e-9)
        assert m.auroc == 1.0

    def test_constant_half(self):
        y = np.array([0, 1] * 15)
        assert expected_calibration_error(np.full(30, 0.5), y) == pytest.approx(0.0)
        assert auroc(np.full(30, 0.5), y) == 0.5

    def test_two_points(self):
        p, y = np.array([0.2, 0.8]), np.array([0, 1])
        assert np.mean((p - y) ** 2) == pytest.approx(0.04)
        assert auroc(p, y) == 1.0

    def test_recalibration_recovers_slope(self, rng):
        p = rng.uniform(0.05, 0.95, 20000)
        y = (rng.random(p.size) < p).astype(int)
        a, b, ok = logistic_recalibration(p, y)
        assert ok and b == pytest.approx(1.0, abs=0.08) and a == pytest.approx(0.0, abs=0.08)

    def test_errors(self):
        with pytest.raises(LowSample):
            calibration_metrics([0.5] * 10, [0, 1] * 5)
        with pytest.raises(SingleClass):
            calibration_metrics([0.5] * 30, [1] * 30)

    @given(arrays(np.float64, 40, elements=st.floats(0.01, 0.99)), st.data())
    def test_auroc_rank_invariant(self, p, data):
        y = data.draw(arrays(np.int64, 40, elements=st.integers(0, 1)))
        assume(0 < y.sum() < y.size)
        assert auroc(p, y) == pytest.approx(auroc(p ** 3, y))

    @given(arrays(np.float64, 40, elements=st.floats(0, 1)), st.data())
    def test_brier_bound(self, p, data):
        y = data.draw(arrays(np.int64, 40, elements=st.integers(0, 1)))
        assert np.mean((p - y) ** 2) <= 0.25 + abs(p.mean() - y.mean()) + 1.0

    def test_ece_zero_for_bin_frequencies(self, rng):
        y = rng.integers(0, 2, 200)
        raw = rng.random(200)
        from tsaudit.eval import quantile_bins

        p = np.empty(200)
        for b in quantile_bins(raw, y):
            idx = (raw >= b["lo"]) & (raw <= b["hi"])
            p[idx] = y[idx].mean()
        assert expected_calibration_error(p, y) == pytest.approx(0.0, abs=1e-12)


class TestSelective:
    def test_all_recommend(self):
        s = selective_metrics(["recommend"] * 4, [0, 1, 0, 0])
        assert s.coverage == 1 and s.selective_fpr == s.failure_rate == 0.25

    def test_all_abstain(self):
        s = selective_metrics(["abstain"] * 3, [0, 1, 0])
        assert s.coverage == 0 and s.selective_fpr is None and s.selective_f1 is None

    def test_hand_count(self):
        s = selective_metrics(["recommend", "recommend", "abstain", "abstain"], [0, 1, 1, 0])
        assert (s.coverage, s.selective_fpr, s.abstention_precision) == (0.5, 0.5, 0.5)

    def test_other_method_counts_as_discouraged(self):
        d = [Decision("recommend", "PCMCI+", 0.9), Decision("recommend", "Granger", 0.9)]
        s = selective_metrics(d, [1, 0])
        assert s.precision_discourage == 1.0

    @given(st.lists(st.tuples(st.booleans(), st.booleans()), min_size=1, max_size=50))
    def test_coverage_complement(self, rows):
        s = selective_metrics(["recommend" if r else "abstain" for r, _ in rows], [f for _, f in rows])
        n_abs = sum(not r for r, _ in rows)
        assert s.coverage + n_abs / len(rows) == 1.0


class TestSplit:
    def test_stratified(self):
        fams = [f"F{1 + i // 10}" for i in range(100)]
        cal, hold = stratified_split(fams, 0.2, 0)
        assert len(hold) == 20 and sorted(cal + hold) == list(range(100))
        assert all(sum(fams[i] == f for i in hold) == 2 for f in set(fams))
        assert stratified_split(fams, 0.2, 0) == (cal, hold)

    def test_strata(self):
        assert severity_stratum("F1", 0.9) == "clean"
        assert severity_stratum("F3", 0.9) == "severe"
        assert severity_stratum("F3", 0.1) == "moderate"
        assert severity_stratum("F7", 0.9) == "moderate"


@pytest.fixture(scope="module")
def small_atlas():
    return generate_atlas(11, 8)[0]


class TestBenchmark:
    def test_report_shape_and_determinism(self, small_atlas, tmp_path):
        a = run_benchmark(small_atlas, include_runtime=False)
        b = run_benchmark(small_atlas, include_runtime=False)
        assert a == b
        assert set(a["calibration"]) == {"nonstat", "irreg", "persist", "confound"}
        assert a["selective"] is not None and a["fixtures"]["passed"] == 21
        write_bins_csv(a, tmp_path / "bins.csv")
        assert (tmp_path / "bins.csv").read_text().startswith("dimension,bin")

    def test_strict_policy_trades_coverage(self, full_benchmark):
        d, s = full_benchmark["selective_atlas"], full_benchmark["selective_atlas_strict"]
        assert s["coverage"] < d["coverage"]
        assert s["selective_fpr"] <= d["selective_fpr"]
