"""Command-line entry points."""
import json

import numpy as np
import pytest

from tsaudit.atlas import generate_dataset, sample_specs
from tsaudit.cli import main
from tsaudit.core import TimeSeriesMatrix, save_series_csv, save_series_json

ARTIFACTS = ("audit_evidence.json", "risk_profile.json", "recommendation_policy.json")


@pytest.fixture(scope="module")
def f1_series(tmp_path_factory):
    d = tmp_path_factory.mktemp("f1")
    e = generate_dataset(sample_specs("F1", 1, 0)[0])
    save_series_json(e.data, d / "f1.json")
    return d / "f1.json"


@pytest.fixture(scope="module")
def c1_series(tmp_path_factory):
    # strong trend plus seasonality, in the spirit of the C1 benchmark row
    d = tmp_path_factory.mktemp("c1")
    rng = np.random.default_rng(0)
    t = np.arange(600)
    x = 0.05 * t[:, None] + 3 * np.sin(2 * np.pi * t / 12)[:, None] + rng.standard_normal((600, 4))
    save_series_csv(TimeSeriesMatrix.from_array(x), d / "c1.csv")
    return d / "c1.csv"


def _policy(out):
    return json.loads((out / "recommendation_policy.json").read_text())


class TestAudit:
    def test_recommend(self, f1_series, tmp_path, capsys):
        assert main(["audit", str(f1_series), "--out", str(tmp_path)]) == 0
        assert all((tmp_path / f).is_file() for f in ARTIFACTS)
        assert _policy(tmp_path)["decision"] == "recommend"
        assert json.loads(capsys.readouterr().out)["decision"] == "recommend"

    def test_abstain_exits_zero(self, c1_series, tmp_path):
        assert main(["audit", str(c1_series), "--out", str(tmp_path), "--no-nonlinearity"]) == 0
        pol = _policy(tmp_path)
        assert pol["decision"] == "abstain"
        assert "catastrophic_nonstationarity" in pol["reasons"]

    def test_idempotent(self, f1_series, tmp_path):
        main(["audit", str(f1_series), "--out", str(tmp_path / "a"), "--seed", "4"])
        main(["audit", str(f1_series), "--out", str(tmp_path / "b"), "--seed", "4"])
        for f in ARTIFACTS:
            assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()

    def test_missing_input_writes_nothing(self, tmp_path, capsys):
        out = tmp_path / "out"
        assert main(["audit", str(tmp_path / "nope.csv"), "--out", str(out)]) == 3
        assert not out.exists()
        assert "ParseError" in capsys.readouterr().err

    def test_failure_leaves_old_outputs(self, f1_series, tmp_path):
        main(["audit", str(f1_series), "--out", str(tmp_path)])
        before = {f: (tmp_path / f).read_bytes() for f in ARTIFACTS}
        bad = tmp_path / "short.csv"
        bad.write_text("t,a,b\n0,1,2\n1,2,3\n2,3,1\n3,1,1\n")
        assert main(["audit", str(bad), "--out", str(tmp_path)]) != 0
        assert before == {f: (tmp_path / f).read_bytes() for f in ARTIFACTS}
        assert not list(tmp_path.glob(".*.tmp"))

    def test_cli_beats_yaml(self, f1_series, tmp_path):
        cfg = tmp_path / "c.yaml"
        cfg.write_text("audit:\n  n_bootstrap: 7\n  seed: 1\n")
        main(["audit", str(f1_series), "--out", str(tmp_path / "o"), "--config", str(cfg), "--seed", "9"])
        conf = _policy(tmp_path / "o")["config"]
        assert conf["n_bootstrap"] == 7 and conf["seed"] == 9


class TestDecide:
    def test_point_profile(self, tmp_path, capsys):
        p = tmp_path / "p.json"
        p.write_text(json.dumps({"nonstat": 1.0, "irreg": 0.18, "persist": 1.0, "confound": 1.0,
                                 "t_eff_ratio": 0.9}))
        assert main(["decide", "--risk-profile", str(p)]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["decision"] == "abstain" and "catastrophic_nonstationarity" in out["reasons"]

    def test_fixtures(self, tmp_path):
        assert main(["decide", "--fixtures", "--out", str(tmp_path / "fx.json")]) == 0
        assert json.loads((tmp_path / "fx.json").read_text())["passed"] == 21

    def test_bad_profile(self, tmp_path):
        p = tmp_path / "p.json"
        p.write_text('{"nonstat": 0.1}')
        assert main(["decide", "--risk-profile", str(p)]) == 3


def test_atlas_calibrate_evaluate(tmp_path):
    atlas = tmp_path / "atlas"
    assert main(["generate-atlas", "--seed", "2", "--count", "7", "--out", str(atlas)]) == 0
    assert main(["generate-atlas", "--seed", "2", "--count", "7", "--out", str(atlas)]) != 0
    cal = tmp_path / "cal.yaml"
    assert main(["calibrate", "--atlas", str(atlas), "--out", str(cal)]) == 0
    rep = tmp_path / "r.json"
    args = ["evaluate", "--atlas", str(atlas), "--calibration", str(cal), "--out", str(rep), "--no-runtime"]
    assert main(args + ["--bins-csv", str(tmp_path / "bins.csv")]) == 0
    first = rep.read_bytes()
    assert main(args) == 0
    assert rep.read_bytes() == first
    report = json.loads(first)
    assert report["fixtures"]["passed"] == 21 and "runtime" not in report


def test_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["audit"])
    assert exc.value.code == 2
