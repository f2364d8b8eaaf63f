"""Domain types, configuration and dataset ingestion shared by all stages."""
from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .errors import DegenerateSeries, NonMonotoneTime, ParseError

__all__ = [
    "TimeSeriesMatrix",
    "SummaryGraph",
    "FeatureAnchors",
    "AbstentionThresholds",
    "AuditConfig",
    "load_series",
    "save_series_json",
    "load_config",
    "child_rng",
]


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class TimeSeriesMatrix:
    """A T x N panel of observations with a missingness mask.

    Masked cells are stored as NaN in ``values`` but carry no meaning;
    always consult ``mask``.
    """

    timestamps: np.ndarray
    values: np.ndarray
    mask: np.ndarray
    names: tuple[str, ...]

    def __post_init__(self) -> None:
        ts = np.asarray(self.timestamps, dtype=float).ravel()
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim == 1:
            vals = vals[:, None]
        mask = np.asarray(self.mask, dtype=bool)
        if vals.ndim != 2 or mask.shape != vals.shape or ts.shape[0] != vals.shape[0]:
            raise ParseError(
                f"shape mismatch: timestamps {ts.shape}, values {vals.shape}, mask {mask.shape}"
            )
        names = tuple(str(n) for n in self.names)
        if len(names) != vals.shape[1]:
            raise ParseError(f"{len(names)} names for {vals.shape[1]} columns")
        if ts.shape[0] < 2:
            raise DegenerateSeries(f"need T >= 2 rows, got {ts.shape[0]}")
        if vals.shape[1] < 1:
            raise DegenerateSeries("need at least one column")
        if not np.all(np.isfinite(ts)):
            raise ParseError("non-finite timestamp")
        if np.any(np.diff(ts) <= 0):
            bad = int(np.argmax(np.diff(ts) <= 0))
            raise NonMonotoneTime(f"timestamps not strictly increasing at row {bad + 1}")
        mask = mask | ~np.isfinite(vals)
        counts = (~mask).sum(axis=0)
        if np.any(counts < 2):
            j = int(np.argmin(counts))
            raise DegenerateSeries(f"column {names[j]!r} has {counts[j]} observed entries")
        vals = np.where(mask, np.nan, vals)
        object.__setattr__(self, "timestamps", _frozen(ts))
        object.__setattr__(self, "values", _frozen(vals))
        object.__setattr__(self, "mask", _frozen(mask))
        object.__setattr__(self, "names", names)

    @classmethod
    def from_array(cls, values, timestamps=None, names=None, mask=None) -> "TimeSeriesMatrix":
        values = np.asarray(values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        T, N = values.shape
        if timestamps is None:
            timestamps = np.arange(T, dtype=float)
        if names is None:
            names = [f"x{j}" for j in range(N)]
        if mask is None:
            mask = ~np.isfinite(values)
        return cls(np.asarray(timestamps, float), values, np.asarray(mask, bool), tuple(names))

    @property
    def T(self) -> int:
        return self.values.shape[0]

    @property
    def N(self) -> int:
        return self.values.shape[1]

    def observed(self, j: int) -> np.ndarray:
        """Observed values of column ``j`` with masked rows dropped."""
        return self.values[~self.mask[:, j], j]

    def complete_rows(self) -> np.ndarray:
        """Boolean index of rows with every column observed."""
        return ~self.mask.any(axis=1)

    def row_observed(self) -> np.ndarray:
        """Boolean index of rows with at least one observed column."""
        return ~self.mask.all(axis=1)

    def missing_fraction(self) -> float:
        return float(self.mask.mean())

    def to_json_dict(self) -> dict:
        vals = [
            [None if m else float(v) for v, m in zip(row, mrow)]
            for row, mrow in zip(self.values.tolist(), self.mask.tolist())
        ]
        return {
            "timestamps": [float(t) for t in self.timestamps],
            "values": vals,
            "names": list(self.names),
        }

    @classmethod
    def from_json_dict(cls, obj: Mapping[str, Any]) -> "TimeSeriesMatrix":
        try:
            ts = np.asarray(obj["timestamps"], dtype=float)
            rows = obj["values"]
            names = obj.get("names")
            N = len(rows[0]) if rows else 0
            if any(len(r) != N for r in rows):
                raise ParseError("ragged values matrix")
            mask = np.array([[v is None for v in r] for r in rows], dtype=bool).reshape(len(rows), N)
            vals = np.array(
                [[math.nan if v is None else float(v) for v in r] for r in rows], dtype=float
            ).reshape(len(rows), N)
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise ParseError(f"malformed JSON matrix: {exc}") from exc
        if names is None:
            names = [f"x{j}" for j in range(N)]
        return cls(ts, vals, mask, tuple(names))


@dataclass(frozen=True)
class SummaryGraph:
    """Lagged directed edges ``(source, target, lag)``."""

    n_vars: int
    tau_max: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        if self.n_vars < 1 or self.tau_max < 0:
            raise ValueError("n_vars must be >= 1 and tau_max >= 0")
        edges = frozenset((int(i), int(j), int(t)) for i, j, t in self.edges)
        for i, j, t in edges:
            if not (0 <= i < self.n_vars and 0 <= j < self.n_vars):
                raise ValueError(f"edge {(i, j, t)} outside [0, {self.n_vars})")
            if not 0 <= t <= self.tau_max:
                raise ValueError(f"edge {(i, j, t)} lag outside [0, {self.tau_max}]")
            if i == j and t == 0:
                raise ValueError(f"self-edge at lag 0: {(i, j, t)}")
        object.__setattr__(self, "edges", edges)

    def adjacency(self) -> frozenset:
        return frozenset((i, j) for i, j, _ in self.edges)

    def to_json_dict(self) -> dict:
        return {
            "n_vars": self.n_vars,
            "tau_max": self.tau_max,
            "edges": [list(e) for e in sorted(self.edges)],
        }

    @classmethod
    def from_json_dict(cls, obj: Mapping[str, Any]) -> "SummaryGraph":
        return cls(int(obj["n_vars"]), int(obj["tau_max"]), frozenset(tuple(e) for e in obj["edges"]))


@dataclass(frozen=True)
class FeatureAnchors:
    """Scales mapping raw diagnostics onto [0, 1] feature slots."""

    break_mag_sd: float = 3.0
    drift_z: float = 6.0
    missing_fraction: float = 0.5
    tau_int: float = 20.0
    resid_var_ratio: float = 10.0
    vif_log10: float = 4.0


@dataclass(frozen=True)
class AbstentionThresholds:
    min_teff_ratio: float = 0.30
    max_interval_width: float = 0.50
    catastrophic_nonstat: float = 0.85
    compound_nonstat: float = 0.70
    compound_confound: float = 0.85
    catastrophic_composite: float = 0.90
    min_confidence: float = 0.60
    persist_prefers_pcmci: float = 0.70
    # strict policy variant: abstain unless every point risk is below this
    strict_max_risk: float | None = None


@dataclass(frozen=True)
class AuditConfig:
    u_plus: float = 1.0
    u_minus: float = 4.0
    u_abstain: float = 0.5
    n_bootstrap: int = 100
    seed: int = 0
    alpha: float = 0.05
    max_lag: int = 1
    period_hint: float | None = None
    anchors: FeatureAnchors = field(default_factory=FeatureAnchors)
    thresholds: AbstentionThresholds = field(default_factory=AbstentionThresholds)

    def __post_init__(self) -> None:
        if self.n_bootstrap < 1:
            raise ValueError("n_bootstrap must be >= 1")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        if min(self.u_plus, self.u_minus, self.u_abstain) < 0:
            raise ValueError("utilities must be non-negative")
        if self.u_minus < self.u_abstain:
            raise ValueError("u_minus must be >= u_abstain")
        if self.max_lag < 1:
            raise ValueError("max_lag must be >= 1")
        for f in fields(self.thresholds):
            v = getattr(self.thresholds, f.name)
            if v is not None and not 0.0 <= v <= 1.0:
                raise ValueError(f"threshold {f.name}={v} outside [0, 1]")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, obj: Mapping[str, Any] | None) -> "AuditConfig":
        obj = dict(obj or {})
        known = {f.name for f in fields(cls)}
        unknown = set(obj) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        if "anchors" in obj:
            obj["anchors"] = FeatureAnchors(**obj["anchors"])
        if "thresholds" in obj:
            obj["thresholds"] = AbstentionThresholds(**obj["thresholds"])
        return cls(**obj)

    def with_overrides(self, **kw) -> "AuditConfig":
        kw = {k: v for k, v in kw.items() if v is not None}
        return replace(self, **kw)


def load_config(path: str | Path | None) -> tuple[AuditConfig, dict]:
    """Load the ``audit`` section of a YAML file.

    Returns the parsed config plus the raw document so that other sections
    (method catalog, calibration) can be read by their owners.
    """
    import yaml

    if path is None:
        return AuditConfig(), {}
    with open(path) as fh:
        doc = yaml.safe_load(fh) or {}
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: top level must be a mapping")
    return AuditConfig.from_dict(doc.get("audit")), doc


def _parse_float(text: str, where: str) -> float:
    try:
        return float(text)
    except ValueError as exc:
        raise ParseError(f"{where}: not a number: {text!r}") from exc


def load_series(path: str | Path, format: str | None = None) -> TimeSeriesMatrix:
    """Read a panel from CSV (first column = time) or the JSON matrix format."""
    path = Path(path)
    if not path.is_file():
        raise ParseError(f"no such file: {path}")
    if format is None:
        format = "json" if path.suffix.lower() == ".json" else "csv"
    if format in ("json", "json-matrix"):
        try:
            obj = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: {exc}") from exc
        return TimeSeriesMatrix.from_json_dict(obj)
    if format not in ("csv", "csv-with-time-column"):
        raise ValueError(f"unknown format {format!r}")

    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if len(rows) < 2:
        raise ParseError(f"{path}: need a header and at least one data row")
    header = rows[0]
    if len(header) < 2:
        raise ParseError(f"{path}: need a time column and at least one variable")
    names = tuple(h.strip() for h in header[1:])
    ts, vals, mask = [], [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise ParseError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
        ts.append(_parse_float(row[0], f"{path}:{lineno}"))
        rv, rm = [], []
        for cell in row[1:]:
            cell = cell.strip()
            if cell == "" or cell.lower() in ("nan", "na", "null"):
                rv.append(math.nan)
                rm.append(True)
            else:
                rv.append(_parse_float(cell, f"{path}:{lineno}"))
                rm.append(False)
        vals.append(rv)
        mask.append(rm)
    return TimeSeriesMatrix(np.asarray(ts), np.asarray(vals), np.asarray(mask), names)


def save_series_json(series: TimeSeriesMatrix, path: str | Path) -> None:
    Path(path).write_text(json.dumps(series.to_json_dict()))


def save_series_csv(series: TimeSeriesMatrix, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["time", *series.names])
        for t, row, mrow in zip(series.timestamps, series.values, series.mask):
            w.writerow([repr(float(t))] + ["" if m else repr(float(v)) for v, m in zip(row, mrow)])


def child_rng(seed: int, *path: int) -> np.random.Generator:
    """Independent generator derived from ``seed`` and an index path."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, path)]))
