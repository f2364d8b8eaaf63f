"""Stage I: assumption diagnostics and feature normalization."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from ..core import AuditConfig, TimeSeriesMatrix
from ..errors import AuditError
from .confounding import ConfoundingBlock, audit_confounding
from .features import FEATURE_NAMES, normalize_features
from .irregularity import IrregularityBlock, audit_irregularity, gap_coefficient_of_variation
from .multitest import benjamini_yekutieli
from .nonlinearity import NonlinearityBlock, audit_nonlinearity
from .persistence import PersistenceBlock, audit_persistence, integrated_autocorr_time
from .stationarity import StationarityBlock, audit_stationarity

__all__ = [
    "DiagnosticReport",
    "audit",
    "audit_stationarity",
    "audit_irregularity",
    "audit_persistence",
    "audit_nonlinearity",
    "audit_confounding",
    "integrated_autocorr_time",
    "gap_coefficient_of_variation",
    "benjamini_yekutieli",
    "normalize_features",
    "FEATURE_NAMES",
]


@dataclass
class DiagnosticReport:
    T: int
    N: int
    names: list[str]
    stationarity: StationarityBlock
    irregularity: IrregularityBlock
    persistence: PersistenceBlock
    nonlinearity: NonlinearityBlock | None
    confounding: ConfoundingBlock
    features: dict[str, float]
    flags: list[str] = field(default_factory=list)

    def to_json_dict(self) -> dict[str, Any]:
        return _jsonable(asdict(self))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def audit(series: TimeSeriesMatrix, config: AuditConfig | None = None,
          include_nonlinearity: bool = True) -> DiagnosticReport:
    """Run all five diagnostic families and normalize them into features."""
    config = config or AuditConfig()
    st = audit_stationarity(series, config.alpha)
    ir = audit_irregularity(series, config.period_hint)
    pe = audit_persistence(series)
    cf = audit_confounding(series)
    nl = None
    flags: list[str] = []
    if include_nonlinearity:
        try:
            nl = audit_nonlinearity(series, seed=config.seed)
        except AuditError as exc:
            nl = NonlinearityBlock([], False, applicable=False)
            flags.append(f"nonlinearity:not-applicable:{type(exc).__name__}")
    features, fflags = normalize_features(st, ir, pe, cf, config.anchors)
    flags.extend(fflags)
    if st.degenerate_columns:
        flags.append("stationarity:degenerate-columns:" + ",".join(map(str, st.degenerate_columns)))
    if cf.design != "complete-case":
        flags.append(f"confounding:{cf.design}")
    if ir.mcar_applicable:
        flags.append("irregularity:mcar-uses-pairwise-moments")
    return DiagnosticReport(series.T, series.N, list(series.names), st, ir, pe, nl, cf, features, flags)
