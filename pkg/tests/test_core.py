"""Ingestion, config and serialization contracts."""
import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from tsaudit.core import (AuditConfig, SummaryGraph, TimeSeriesMatrix, child_rng, load_config,
                          load_series, save_series_csv, save_series_json)
from tsaudit.errors import DegenerateSeries, NonMonotoneTime, ParseError


def _write(tmp_path, text, name="s.csv"):
    p = tmp_path / name
    p.write_text(text)
    return p


class TestLoadSeries:
    def test_small_csv(self, tmp_path):
        s = load_series(_write(tmp_path, "t,a,b\n0,1,2\n1,3,4\n2,5,6\n"))
        assert (s.T, s.N) == (3, 2)
        assert not s.mask.any()
        assert s.names == ("a", "b")

    def test_non_monotone_time(self, tmp_path):
        with pytest.raises(NonMonotoneTime):
            load_series(_write(tmp_path, "t,a\n0,1\n2,2\n1,3\n"))

    def test_empty_cell_is_masked(self, tmp_path):
        s = load_series(_write(tmp_path, "t,a,b\n0,1,2\n1,,4\n2,5,6\n"))
        assert s.mask.tolist() == [[False, False], [True, False], [False, False]]
        assert s.values[0, 0] == 1 and s.values[2, 0] == 5 and s.values[1, 1] == 4

    def test_bad_number(self, tmp_path):
        with pytest.raises(ParseError, match="not a number"):
            load_series(_write(tmp_path, "t,a\n0,1\n1,x\n"))

    def test_ragged_row(self, tmp_path):
        with pytest.raises(ParseError):
            load_series(_write(tmp_path, "t,a,b\n0,1,2\n1,3\n"))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ParseError):
            load_series(tmp_path / "nope.csv")

    def test_column_without_observations(self):
        with pytest.raises(DegenerateSeries):
            TimeSeriesMatrix.from_array(np.array([[1.0, np.nan], [2.0, np.nan], [3.0, 1.0]]))

    def test_nan_values_join_mask(self):
        s = TimeSeriesMatrix.from_array(np.array([[1.0, 2.0], [np.nan, 1.0], [3.0, 0.0]]))
        assert s.mask[1, 0]

    def test_arrays_are_read_only(self):
        s = TimeSeriesMatrix.from_array(np.ones((3, 1)) * np.arange(3)[:, None])
        with pytest.raises(ValueError):
            s.values[0, 0] = 9.0


finite = st.floats(-1e300, 1e300, allow_nan=False, allow_infinity=False)


class TestRoundTrip:
    @given(arrays(np.float64, st.tuples(st.integers(3, 12), st.integers(1, 4)), elements=finite),
           st.data())
    def test_json_bit_exact(self, tmp_path_factory, vals, data):
        mask = data.draw(arrays(np.bool_, vals.shape))
        mask[:2] = False  # every column keeps >= 2 observations
        s = TimeSeriesMatrix.from_array(vals, timestamps=np.cumsum(np.ones(vals.shape[0])) * 0.5,
                                        mask=mask)
        p = tmp_path_factory.mktemp("rt") / "s.json"
        save_series_json(s, p)
        r = load_series(p)
        assert np.array_equal(r.timestamps, s.timestamps)
        assert np.array_equal(r.mask, s.mask)
        assert np.array_equal(r.values[~r.mask], s.values[~s.mask])
        assert r.names == s.names

    def test_csv_round_trip(self, tmp_path, rng):
        x = rng.standard_normal((20, 3))
        x[4, 1] = np.nan
        s = TimeSeriesMatrix.from_array(x)
        save_series_csv(s, tmp_path / "s.csv")
        r = load_series(tmp_path / "s.csv")
        assert np.array_equal(r.mask, s.mask)
        assert np.array_equal(r.values[~r.mask], s.values[~s.mask])


class TestSummaryGraph:
    def test_rejects_lag0_self_edge(self):
        with pytest.raises(ValueError):
            SummaryGraph(2, 1, frozenset({(0, 0, 0)}))

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            SummaryGraph(2, 1, frozenset({(0, 2, 1)}))

    def test_json_round_trip(self):
        g = SummaryGraph(3, 2, frozenset({(0, 1, 1), (2, 0, 2)}))
        assert SummaryGraph.from_json_dict(json.loads(json.dumps(g.to_json_dict()))) == g


class TestConfig:
    def test_defaults(self):
        c = AuditConfig()
        assert (c.u_plus, c.u_minus, c.u_abstain) == (1.0, 4.0, 0.5)
        assert c.thresholds.catastrophic_nonstat == 0.85

    def test_yaml_and_unknown_keys(self, tmp_path):
        p = tmp_path / "c.yaml"
        p.write_text("audit:\n  n_bootstrap: 7\n  thresholds:\n    min_confidence: 0.5\n")
        cfg, doc = load_config(p)
        assert cfg.n_bootstrap == 7 and cfg.thresholds.min_confidence == 0.5
        assert "audit" in doc
        p.write_text("audit:\n  bogus: 1\n")
        with pytest.raises(ValueError, match="unknown"):
            load_config(p)

    def test_overrides_skip_none(self):
        c = AuditConfig(seed=3).with_overrides(seed=None, n_bootstrap=5)
        assert c.seed == 3 and c.n_bootstrap == 5

    @pytest.mark.parametrize("kw", [{"n_bootstrap": 0}, {"alpha": 1.0}, {"u_minus": 0.1}, {"max_lag": 0}])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            AuditConfig(**kw)


def test_child_rng_is_deterministic_and_path_dependent():
    a = child_rng(1, 2, 3).standard_normal(4)
    assert np.array_equal(a, child_rng(1, 2, 3).standard_normal(4))
    assert not np.array_equal(a, child_rng(1, 3, 2).standard_normal(4))
