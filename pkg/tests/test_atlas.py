"""Synthetic benchmark generator."""
import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tsaudit.atlas import (F4_RHO, FAMILIES, DgpSpec, generate_atlas, generate_dataset, load_atlas,
                           sample_specs, severity_labels, spectral_radius, stable_var_matrix,
                           write_atlas)


class TestStableMatrix:
    def test_scalar(self):
        assert stable_var_matrix(1, 0.5, seed=0) == pytest.approx(np.array([[0.5]]))

    def test_zero(self):
        assert not stable_var_matrix(4, 0.0, seed=0).any()

    def test_rescaled(self):
        assert abs(spectral_radius(stable_var_matrix(6, 0.95, 0.3, seed=7)) - 0.95) < 1e-6

    @given(st.integers(1, 12), st.floats(0.01, 0.99), st.integers(0, 2**31))
    def test_radius_and_diagonal(self, N, rho, seed):
        A = stable_var_matrix(N, rho, seed=seed)
        assert abs(spectral_radius(A) - rho) < 1e-6
        assert np.all(np.diag(A) != 0)

    def test_bad_inputs(self):
        with pytest.raises(ValueError):
            stable_var_matrix(3, 1.2)
        with pytest.raises(ValueError):
            stable_var_matrix(0, 0.5)


class TestSpecs:
    @pytest.mark.parametrize("family", FAMILIES)
    def test_counts_and_validity(self, family):
        specs = sample_specs(family, 20, 0)
        assert len(specs) == 20 and len({s.seed for s in specs}) == 20
        for s in specs:
            DgpSpec.from_dict(json.loads(json.dumps(s.to_dict())))

    def test_f1_and_f4_rho(self):
        assert all(s.params["rho"] <= 0.7 for s in sample_specs("F1", 50, 0))
        assert all(F4_RHO[0] <= s.params["rho"] <= F4_RHO[1] for s in sample_specs("F4", 50, 0))

    def test_f5_grid(self):
        for s in sample_specs("F5", 50, 0):
            assert s.params["n_latent"] in (1, 2) and s.params["sigma_conf"] in (0.3, 0.6, 0.9)

    def test_validation(self):
        good = sample_specs("F1", 1, 0)[0]
        with pytest.raises(ValueError):
            DgpSpec("F1", good.N, good.T, 0, {**good.params, "rho": 0.9})
        with pytest.raises(ValueError):
            DgpSpec("F1", 99, good.T, 0, dict(good.params))

    def test_labels_from_parameters(self):
        s = sample_specs("F2", 10, 0)
        for spec in s:
            lab, sev = severity_labels(spec)
            assert lab["nonstat"] == (spec.params["break_mag"] >= 1.25)
            assert all(0 <= v <= 1 for v in sev.values())


class TestDatasets:
    def test_f4_measured_radius(self):
        for spec in sample_specs("F4", 10, 1):
            e = generate_dataset(spec)
            assert F4_RHO[0] - 1e-9 <= e.measured_rho <= F4_RHO[1] + 1e-9

    def test_f3_fraction(self):
        base = next(s for s in sample_specs("F3", 10, 0) if s.params["missing_mechanism"] == "mcar")
        spec = DgpSpec("F3", base.N, base.T, base.seed, {**base.params, "missing_fraction": 0.25})
        assert generate_dataset(spec).data.missing_fraction() == pytest.approx(0.25, abs=0.02)

    def test_deterministic(self):
        spec = sample_specs("F9", 3, 5)[2]
        a, b = generate_dataset(spec), generate_dataset(spec)
        assert np.array_equal(a.data.mask, b.data.mask)
        assert np.array_equal(a.data.values[~a.data.mask], b.data.values[~b.data.mask])
        assert a.truth == b.truth and a.failure == b.failure

    @pytest.mark.parametrize("family", ["F1", "F2", "F5", "F10"])
    def test_truth_fidelity(self, family):
        for spec in sample_specs(family, 3, 2):
            e = generate_dataset(spec)
            nz = {(int(i), int(j), 1) for j, i in zip(*np.nonzero(e.A))}
            assert set(e.truth.edges) == nz

    def test_latent_confounding_visible(self):
        specs = [s for s in sample_specs("F5", 50, 0) if s.params["sigma_conf"] == 0.9][:8]
        corr = []
        for spec in specs:
            e = generate_dataset(spec)
            assert e.data.N == spec.N  # latent columns are not emitted
            a, b = spec.params["latent_children"][0][:2]
            x = e.data.values
            corr.append(abs(np.corrcoef(x[:, a], x[:, b])[0, 1]))
        assert np.mean(corr) > 0.1


def test_write_and_load(tmp_path):
    entries, manifest = generate_atlas(0, 1)
    assert manifest["total"] == 10 and manifest["counts"] == {f: 1 for f in FAMILIES}
    write_atlas(entries, manifest, tmp_path)
    loaded, man2 = load_atlas(tmp_path)
    assert man2 == json.loads(json.dumps(manifest))
    for a, b in zip(entries, loaded):
        assert a.truth == b.truth and a.failure == b.failure and a.labels == b.labels
        assert np.array_equal(a.data.mask, b.data.mask)
        assert b.discovery == json.loads(json.dumps(a.discovery))
