"""Synthetic VAR(1) benchmark with controlled assumption violations.

Every dataset starts from ``X_t = A X_{t-1} + e_t`` and layers one or more
violation mechanisms on top. Families F1..F10 fix which mechanisms are
active and the ranges their parameters are swept over.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .core import SummaryGraph, TimeSeriesMatrix, child_rng, save_series_json
from .discovery import failure_label, granger_tests, score_graph
from .errors import AuditError, DegenerateDraw, UnstableSimulation

FAMILIES = tuple(f"F{i}" for i in range(1, 11))
BURN_IN = 200
EDGE_DENSITY = 0.3
LATENT_AR = 0.8
MAX_REDRAWS = 10

CORE_N = (5, 6, 7, 8)
CORE_T = (500, 750, 1000)
F10_N = (3, 4, 6, 10, 12)
F10_T = (200, 300, 500, 1500, 2000)
BASE_RHO = (0.2, 0.5)
F4_RHO = (0.92, 0.98)
F3_MISSING = (0.15, 0.35)
F5_L = (1, 2)
F5_SIGMA = (0.3, 0.6, 0.9)
F6_PERIODS = (12, 24, 52)
F8_NU = (3, 5, 10)
BREAK_MAG = (0.5, 3.0)
SEASON_AMP = (0.5, 2.5)
F9_COMBOS = (
    ("breaks", "persistence"),
    ("breaks", "irregular"),
    ("persistence", "seasonal"),
    ("irregular", "confound"),
    ("breaks", "irregular", "persistence", "seasonal", "confound"),
)
F10_CASES = ("short", "sparse", "high_dim", "near_unit_root")

# severity cut-offs turning generator parameters into per-dimension labels
LABEL_BREAK_MAG = 1.25
LABEL_MISSING = 0.25
LABEL_RHO = 0.85
LABEL_SIGMA = 0.6


def stable_var_matrix(N: int, rho: float, density: float = EDGE_DENSITY,
                      seed: int | np.random.Generator | None = None,
                      max_tries: int = 100) -> np.ndarray:
    """Sparse random coefficient matrix rescaled to spectral radius ``rho``.

    Diagonal entries are always present; off-diagonal entries appear with
    probability ``density``.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if not 0.0 <= rho <= 0.99:
        raise ValueError(f"rho {rho} outside [0, 0.99]")
    if not 0.0 < density <= 1.0:
        raise ValueError(f"density {density} outside (0, 1]")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    if rho == 0.0:
        return np.zeros((N, N))
    for _ in range(max_tries):
        support = rng.random((N, N)) < density
        np.fill_diagonal(support, True)
        A = _values_on_support(support, rng)
        r = spectral_radius(A)
        if r > 1e-8:
            return A * (rho / r)
    raise DegenerateDraw(f"no non-degenerate draw in {max_tries} tries")


def _values_on_support(support: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    N = support.shape[0]
    mag = rng.uniform(0.3, 1.0, size=(N, N))
    sign = np.where(rng.random((N, N)) < 0.5, -1.0, 1.0)
    np.fill_diagonal(sign, 1.0)
    return np.where(support, mag * sign, 0.0)


def redraw_on_support(A: np.ndarray, rho: float, rng: np.random.Generator,
                      max_tries: int = 100) -> np.ndarray:
    """New coefficients with the same nonzero pattern as ``A``."""
    support = A != 0
    for _ in range(max_tries):
        B = _values_on_support(support, rng)
        r = spectral_radius(B)
        if r > 1e-8:
            return B * (rho / r)
    raise DegenerateDraw("support admits no non-degenerate draw")


def spectral_radius(A: np.ndarray) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(A)))) if A.size else 0.0


@dataclass(frozen=True)
class DgpSpec:
    """Everything needed to regenerate one dataset bit-for-bit."""

    family: str
    N: int
    T: int
    seed: int
    params: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.validate()

    @property
    def components(self) -> tuple[str, ...]:
        return tuple(self.params.get("components", ()))

    def validate(self) -> None:
        f, p = self.family, self.params
        if f not in FAMILIES:
            raise ValueError(f"unknown family {f!r}")
        if f == "F10":
            if self.N not in F10_N or self.T not in F10_T:
                raise ValueError(f"F10 size ({self.N}, {self.T}) outside the boundary grid")
            if p.get("case") not in F10_CASES:
                raise ValueError(f"F10 case {p.get('case')!r}")
        elif self.N not in CORE_N or self.T not in CORE_T:
            raise ValueError(f"{f} size ({self.N}, {self.T}) outside N 5..8, T 500/750/1000")
        rho = p.get("rho")
        if rho is None or not 0.0 <= rho <= 0.99:
            raise ValueError(f"rho {rho!r} invalid")
        if f == "F1" and rho > 0.7:
            raise ValueError("F1 requires rho(A) <= 0.7")
        if f == "F4" and not F4_RHO[0] <= rho <= F4_RHO[1]:
            raise ValueError(f"F4 rho {rho} outside {F4_RHO}")
        comps = self.components
        if "irregular" in comps:
            lo, hi = (0.29, 0.37) if f == "F10" else F3_MISSING
            if not lo <= p["missing_fraction"] <= hi:
                raise ValueError(f"missing fraction {p['missing_fraction']} outside [{lo}, {hi}]")
            if p["missing_mechanism"] not in ("mcar", "mar", "seasonal"):
                raise ValueError(f"mechanism {p['missing_mechanism']!r}")
        if "confound" in comps:
            if p["n_latent"] not in F5_L or p["sigma_conf"] not in F5_SIGMA:
                raise ValueError("latent count or sigma_conf outside the allowed grid")
            for ch in p["latent_children"]:
                if len(ch) < 2 or not all(0 <= c < self.N for c in ch):
                    raise ValueError("each latent needs >= 2 valid children")
        if "seasonal" in comps and p["period"] not in F6_PERIODS:
            raise ValueError(f"period {p['period']} not in {F6_PERIODS}")
        if "heavy_tail" in comps:
            if p["noise"] == "t" and p["nu"] not in F8_NU:
                raise ValueError(f"nu {p['nu']} not in {F8_NU}")
            if p["noise"] not in ("t", "laplace"):
                raise ValueError(f"noise {p['noise']!r}")
        if "breaks" in comps:
            bk = p["breaks"]
            if not 1 <= len(bk) <= 3 or list(bk) != sorted(bk):
                raise ValueError("need 1-3 sorted break times")
            if not all(0.2 * self.T <= b <= 0.8 * self.T for b in bk):
                raise ValueError("break times must lie in [0.2T, 0.8T]")
            if len(p["regime_rhos"]) != len(bk) + 1:
                raise ValueError("one spectral radius per regime")
        if "nonlinear" in comps and p["transform"] not in ("tanh", "sin", "relu"):
            raise ValueError(f"transform {p['transform']!r}")

    def to_dict(self) -> dict:
        return {"family": self.family, "N": self.N, "T": self.T, "seed": self.seed,
                "params": _plain(self.params)}

    @classmethod
    def from_dict(cls, obj: Mapping) -> "DgpSpec":
        return cls(obj["family"], int(obj["N"]), int(obj["T"]), int(obj["seed"]), dict(obj["params"]))


def _plain(obj):
    if isinstance(obj, Mapping):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


@dataclass
class AtlasEntry:
    spec: DgpSpec
    data: TimeSeriesMatrix
    truth: SummaryGraph
    A: np.ndarray
    labels: dict[str, bool]
    severity: dict[str, float]
    failure: bool
    discovery: dict = field(default_factory=dict)

    @property
    def measured_rho(self) -> float:
        return spectral_radius(self.A)


# ---------------------------------------------------------------- specs

def _pick_children(N: int, rng: np.random.Generator) -> list[int]:
    k = int(rng.integers(2, N + 1))
    return sorted(int(c) for c in rng.choice(N, size=k, replace=False))


def _break_times(T: int, n: int, rng: np.random.Generator) -> list[int]:
    lo, hi = int(np.ceil(0.2 * T)), int(np.floor(0.8 * T))
    gap = int(0.1 * T)
    for _ in range(1000):
        b = sorted(int(x) for x in rng.integers(lo, hi + 1, size=n))
        if all(b2 - b1 >= gap for b1, b2 in zip(b, b[1:])):
            return b
    # evenly spaced fallback keeps the spec valid for any T
    return [int(x) for x in np.linspace(lo, hi, n)]


def _component_params(comps, N, T, s, rng, high=False) -> dict:
    """Parameters for each active mechanism at severity quantile ``s``."""
    p: dict[str, Any] = {}
    if "breaks" in comps:
        n = int(rng.integers(1, 4))
        lo, hi = BREAK_MAG
        if high:
            lo = (lo + hi) / 2
        p["breaks"] = _break_times(T, n, rng)
        p["break_mag"] = float(lo + s * (hi - lo))
        p["regime_rhos"] = [float(rng.uniform(*BASE_RHO)) for _ in range(n + 1)]
    if "irregular" in comps:
        lo, hi = F3_MISSING
        if high:
            lo = (lo + hi) / 2
        p["missing_fraction"] = float(lo + s * (hi - lo))
        p["missing_mechanism"] = ("mcar", "mar", "seasonal")[int(rng.integers(3))]
    if "persistence" in comps:
        p["rho"] = float(F4_RHO[0] + s * (F4_RHO[1] - F4_RHO[0]))
    if "confound" in comps:
        L = int(rng.choice(F5_L))
        sig = F5_SIGMA[-1] if high else F5_SIGMA[min(int(s * 3), 2)]
        p["n_latent"] = L
        p["sigma_conf"] = float(sig)
        p["latent_children"] = [_pick_children(N, rng) for _ in range(L)]
    if "seasonal" in comps:
        lo, hi = SEASON_AMP
        if high:
            lo = (lo + hi) / 2
        p["period"] = int(rng.choice(F6_PERIODS))
        p["season_amp"] = float(lo + s * (hi - lo))
    if "nonlinear" in comps:
        p["transform"] = ("tanh", "sin", "relu")[int(rng.integers(3))]
    if "heavy_tail" in comps:
        if rng.random() < 0.75:
            p["noise"], p["nu"] = "t", int(rng.choice(F8_NU))
        else:
            p["noise"], p["nu"] = "laplace", None
    return p


_FAMILY_COMPONENTS = {
    "F1": (), "F2": ("breaks",), "F3": ("irregular",), "F4": ("persistence",),
    "F5": ("confound",), "F6": ("seasonal",), "F7": ("nonlinear",), "F8": ("heavy_tail",),
}

# F10 composition: (case, N, T) rows, 50 in total
_F10_PLAN = (
    [("short", 6, 200)] * 8
    + [("sparse", n, t) for n, t in zip([3, 4, 10, 12, 3, 4, 10, 12, 3, 4, 10, 12],
                                        [200, 300, 1500, 200, 300, 1500, 200, 300, 1500, 200, 300, 1500])]
    + [("high_dim", 12, 500)] * 18
    + [("near_unit_root", n, t) for n, t in zip([3, 4, 10, 12, 3, 4, 10, 12, 3, 4, 10, 10],
                                                [200, 300, 1500, 2000, 200, 300, 1500, 2000, 200, 300, 1500, 2000])]
)


def sample_specs(family: str, count: int, master_seed: int) -> list[DgpSpec]:
    """Specs for one family with severity swept over its range."""
    if count < 1:
        raise ValueError("count must be >= 1")
    fam_idx = FAMILIES.index(family)
    rng = child_rng(master_seed, fam_idx)
    # stratified severity quantiles, shuffled against the size grid
    sev = (rng.permutation(count) + rng.random(count)) / count
    sizes = [(CORE_N[i % 4], CORE_T[(i // 4) % 3]) for i in range(count)]
    rng.shuffle(sizes)
    specs = []
    for i in range(count):
        seed = int(child_rng(master_seed, fam_idx, i).integers(2**31 - 1))
        s = float(sev[i])
        N, T = sizes[i]
        if family == "F10":
            case, N, T = _F10_PLAN[i % len(_F10_PLAN)]
            p: dict[str, Any] = {"case": case, "rho": float(rng.uniform(*BASE_RHO))}
            if case == "sparse":
                p["components"] = ["irregular"]
                p["missing_fraction"] = float(0.29 + s * 0.08)
                p["missing_mechanism"] = "mcar"
            elif case == "near_unit_root":
                p["components"] = ["persistence"]
                p["rho"] = float(0.88 + s * 0.04)
            else:
                p["components"] = []
        elif family == "F9":
            comps = F9_COMBOS[i % len(F9_COMBOS)]
            p = {"combo": "+".join(comps), "components": list(comps),
                 "rho": float(rng.uniform(*BASE_RHO))}
            p.update(_component_params(comps, N, T, s, rng, high=True))
            if "breaks" in comps and "persistence" in comps:
                p["regime_rhos"] = [p["rho"]] * len(p["regime_rhos"])
        else:
            comps = _FAMILY_COMPONENTS[family]
            p = {"components": list(comps), "rho": float(rng.uniform(*BASE_RHO))}
            p.update(_component_params(comps, N, T, s, rng))
        p["severity_quantile"] = s
        specs.append(DgpSpec(family, N, T, seed, p))
    return specs


# ---------------------------------------------------------------- simulation

def _noise(spec: DgpSpec, rng: np.random.Generator, n: int) -> np.ndarray:
    p = spec.params
    shape = (n, spec.N)
    if "heavy_tail" in spec.components:
        if p["noise"] == "t":
            nu = p["nu"]
            return rng.standard_t(nu, size=shape) * np.sqrt((nu - 2) / nu)
        return rng.laplace(scale=1 / np.sqrt(2), size=shape)
    return rng.standard_normal(shape)


_TRANSFORMS = {"tanh": np.tanh, "sin": np.sin, "relu": lambda z: np.maximum(z, 0.0)}


def _simulate(spec: DgpSpec, A: np.ndarray, rng: np.random.Generator):
    p, comps = spec.params, spec.components
    N, T = spec.N, spec.T
    total = BURN_IN + T
    eps = _noise(spec, rng, total)
    if "confound" in comps:
        L = p["n_latent"]
        z = np.zeros((total, L))
        u = rng.standard_normal((total, L))
        for t in range(1, total):
            z[t] = LATENT_AR * z[t - 1] + u[t]
        load = np.zeros((L, N))
        for l, ch in enumerate(p["latent_children"]):
            load[l, ch] = p["sigma_conf"]
        eps = eps + z @ load
    regimes = [A]
    starts = [0]
    if "breaks" in comps:
        for b, r in zip(p["breaks"], p["regime_rhos"][1:]):
            regimes.append(redraw_on_support(A, r, rng))
            starts.append(BURN_IN + b)
    f = _TRANSFORMS[p["transform"]] if "nonlinear" in comps else None
    x = np.zeros((total, N))
    k = 0
    for t in range(1, total):
        while k + 1 < len(starts) and t >= starts[k + 1]:
            k += 1
        drive = regimes[k] @ x[t - 1]
        x[t] = (f(drive) if f is not None else drive) + eps[t]
    return x[BURN_IN:], regimes


def _apply_mean_shifts(x: np.ndarray, spec: DgpSpec, rng: np.random.Generator) -> np.ndarray:
    p = spec.params
    sd = x.std(axis=0)
    bounds = [0, *p["breaks"], spec.T]
    level = np.zeros(spec.N)
    out = x.copy()
    for k in range(1, len(bounds) - 1):
        sign = np.where(rng.random(spec.N) < 0.5, -1.0, 1.0)
        level = level + sign * p["break_mag"] * sd
        out[bounds[k] : bounds[k + 1]] += level
    return out


def _apply_seasonality(x: np.ndarray, spec: DgpSpec, rng: np.random.Generator) -> np.ndarray:
    p = spec.params
    sd = x.std(axis=0)
    phase = rng.uniform(0, 2 * np.pi, size=spec.N)
    t = np.arange(spec.T)[:, None]
    return x + p["season_amp"] * sd * np.sin(2 * np.pi * t / p["period"] + phase)


ROW_SHARE = 0.7
SEASONAL_GAP_PERIOD = 12


def _missing_mask(x: np.ndarray, spec: DgpSpec, rng: np.random.Generator) -> np.ndarray:
    """Mask with exactly round(fraction * T * N) cells, mostly whole-row gaps."""
    p = spec.params
    T, N = x.shape
    budget = int(round(p["missing_fraction"] * T * N))
    n_rows = int(round(ROW_SHARE * budget / N))
    mech = p["missing_mechanism"]
    z = (x - x.mean(axis=0)) / x.std(axis=0)
    prev = np.vstack([np.zeros((1, N)), z[:-1]])
    if mech == "mcar":
        w_cell = np.ones((T, N))
    elif mech == "mar":
        # logistic in the previous value of the next column
        w_cell = 1.0 / (1.0 + np.exp(-1.5 * np.roll(prev, -1, axis=1)))
    else:
        phase = np.cos(2 * np.pi * np.arange(T) / SEASONAL_GAP_PERIOD)[:, None]
        w_cell = np.repeat(np.exp(2.0 * phase), N, axis=1)
    w_row = w_cell.mean(axis=1)
    # first and last rows stay observed so the sampling span is fixed
    w_row[[0, -1]] = 0.0
    rows = rng.choice(T, size=n_rows, replace=False, p=w_row / w_row.sum())
    mask = np.zeros((T, N), dtype=bool)
    mask[rows] = True
    w = np.where(mask, 0.0, w_cell).ravel()
    cells = rng.choice(T * N, size=budget - n_rows * N, replace=False, p=w / w.sum())
    mask.ravel()[cells] = True
    return mask


def severity_labels(spec: DgpSpec) -> tuple[dict[str, bool], dict[str, float]]:
    """Per-dimension ground truth from generator parameters alone."""
    p, comps = spec.params, spec.components
    sev = {"nonstat": 0.0, "irreg": 0.0, "persist": 0.0, "confound": 0.0}
    lab = {k: False for k in sev}
    if "breaks" in comps:
        sev["nonstat"] = (p["break_mag"] - BREAK_MAG[0]) / (BREAK_MAG[1] - BREAK_MAG[0])
        lab["nonstat"] = p["break_mag"] >= LABEL_BREAK_MAG
    # seasonality is left out of the nonstat label: neither the stationarity
    # tests nor the break search respond to a stationary periodic mean
    if "irregular" in comps:
        sev["irreg"] = (p["missing_fraction"] - F3_MISSING[0]) / (0.37 - F3_MISSING[0])
        lab["irreg"] = p["missing_fraction"] >= LABEL_MISSING
    rho = p["rho"]
    sev["persist"] = min(max((rho - BASE_RHO[1]) / (F4_RHO[1] - BASE_RHO[1]), 0.0), 1.0)
    lab["persist"] = rho >= LABEL_RHO
    if "confound" in comps:
        sev["confound"] = p["sigma_conf"] / F5_SIGMA[-1]
        lab["confound"] = p["sigma_conf"] >= LABEL_SIGMA
    return lab, {k: float(min(max(v, 0.0), 1.0)) for k, v in sev.items()}


def generate_dataset(spec: DgpSpec, tau_max: int = 1, alpha: float = 0.05) -> AtlasEntry:
    """Simulate one dataset, attach its truth graph, labels and discovery outcome."""
    spec.validate()
    for attempt in range(MAX_REDRAWS):
        rng = np.random.default_rng([spec.seed, attempt])
        A = stable_var_matrix(spec.N, spec.params["rho"], EDGE_DENSITY, rng)
        with np.errstate(over="ignore", invalid="ignore"):
            x, _ = _simulate(spec, A, rng)
        if np.all(np.isfinite(x)) and np.all(x.std(axis=0) > 0):
            break
    else:
        raise UnstableSimulation(f"{spec.family} seed {spec.seed}: non-finite after {MAX_REDRAWS} draws")
    comps = spec.components
    if "breaks" in comps:
        x = _apply_mean_shifts(x, spec, rng)
    if "seasonal" in comps:
        x = _apply_seasonality(x, spec, rng)
    mask = _missing_mask(x, spec, rng) if "irregular" in comps else np.zeros(x.shape, dtype=bool)
    data = TimeSeriesMatrix(np.arange(spec.T, dtype=float), np.where(mask, np.nan, x), mask,
                            tuple(f"x{j}" for j in range(spec.N)))
    edges = frozenset((int(i), int(j), 1) for j, i in zip(*np.nonzero(A)))
    truth = SummaryGraph(spec.N, tau_max, edges)
    labels, severity = severity_labels(spec)
    disc: dict[str, Any]
    try:
        res = granger_tests(data, tau_max, alpha)
        score = score_graph(res.graph, truth)
        raw = score_graph(res.raw_graph, truth)
        failed = failure_label(score)
        disc = {"status": "ok", "score": score.to_dict(), "raw_score": raw.to_dict(),
                "raw_failure": failure_label(raw), "n_edges": len(res.graph.edges)}
    except AuditError as exc:
        failed = True
        disc = {"status": type(exc).__name__, "detail": str(exc)}
    return AtlasEntry(spec, data, truth, A, labels, severity, failed, disc)


# ---------------------------------------------------------------- atlas

def generate_atlas(master_seed: int = 0, count: int = 50,
                   families: tuple[str, ...] = FAMILIES) -> tuple[list[AtlasEntry], dict]:
    """All families' entries plus a manifest describing the composition."""
    entries = []
    for fam in families:
        for spec in sample_specs(fam, count, master_seed):
            entries.append(generate_dataset(spec))
    return entries, build_manifest(entries, master_seed, count)


def entry_id(entry: AtlasEntry, index: int) -> str:
    return f"{entry.spec.family}_{index:03d}"


def _record(entry: AtlasEntry, eid: str) -> dict:
    return {
        "id": eid,
        "family": entry.spec.family,
        "N": entry.spec.N,
        "T": entry.spec.T,
        "seed": entry.spec.seed,
        "measured_rho": round(entry.measured_rho, 12),
        "labels": entry.labels,
        "severity": entry.severity,
        "failure": entry.failure,
        "discovery_status": entry.discovery.get("status"),
        "missing_fraction": entry.data.missing_fraction(),
    }


def build_manifest(entries: list[AtlasEntry], master_seed: int, count: int) -> dict:
    counts: dict[str, int] = {}
    sizes: dict[str, dict[str, dict[str, int]]] = {}
    records = []
    per_family_index: dict[str, int] = {}
    for e in entries:
        f = e.spec.family
        i = per_family_index.get(f, 0)
        per_family_index[f] = i + 1
        counts[f] = counts.get(f, 0) + 1
        s = sizes.setdefault(f, {"N": {}, "T": {}})
        s["N"][str(e.spec.N)] = s["N"].get(str(e.spec.N), 0) + 1
        s["T"][str(e.spec.T)] = s["T"].get(str(e.spec.T), 0) + 1
        records.append(_record(e, entry_id(e, i)))
    return {"master_seed": master_seed, "count_per_family": count, "total": len(entries),
            "counts": counts, "sizes": sizes, "entries": records}


def _atomic_json(path: Path, obj) -> None:
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, path)


def write_atlas(entries: list[AtlasEntry], manifest: dict, out: str | Path) -> Path:
    """One directory per entry plus a top-level manifest.json."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    for rec, e in zip(manifest["entries"], entries):
        d = out / rec["id"]
        d.mkdir(exist_ok=True)
        save_series_json(e.data, d / "data.json")
        _atomic_json(d / "truth_graph.json", e.truth.to_json_dict())
        _atomic_json(d / "spec.json", {"spec": e.spec.to_dict(), "A": e.A.tolist(),
                                       "labels": e.labels, "severity": e.severity,
                                       "failure": e.failure, "discovery": e.discovery})
    _atomic_json(out / "manifest.json", manifest)
    return out


@dataclass
class StoredEntry:
    """An atlas entry read back from disk."""

    id: str
    spec: DgpSpec
    data: TimeSeriesMatrix
    truth: SummaryGraph
    labels: dict[str, bool]
    severity: dict[str, float]
    failure: bool
    discovery: dict = field(default_factory=dict)


def load_atlas(path: str | Path) -> tuple[list[StoredEntry], dict]:
    from .core import load_series

    path = Path(path)
    manifest = json.loads((path / "manifest.json").read_text())
    out = []
    for rec in manifest["entries"]:
        d = path / rec["id"]
        meta = json.loads((d / "spec.json").read_text())
        truth = SummaryGraph.from_json_dict(json.loads((d / "truth_graph.json").read_text()))
        out.append(StoredEntry(rec["id"], DgpSpec.from_dict(meta["spec"]), load_series(d / "data.json"),
                               truth, meta["labels"], meta["severity"], bool(meta["failure"]),
                               meta.get("discovery") or {}))
    return out, manifest
