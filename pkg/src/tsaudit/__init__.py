"""Assumption audits, calibrated failure risk and abstention-aware method choice
for time-series causal discovery."""
from .core import AuditConfig, SummaryGraph, TimeSeriesMatrix, load_config, load_series
from .decision import DEFAULT_CATALOG, Decision, MethodSpec, decide
from .diagnostics import DiagnosticReport, audit
from .errors import AuditError
from .risk import DIMENSIONS, Calibration, RiskProfile, compute_risk_profile

__version__ = "0.1.0"

__all__ = [
    "AuditConfig",
    "AuditError",
    "Calibration",
    "DEFAULT_CATALOG",
    "DIMENSIONS",
    "Decision",
    "DiagnosticReport",
    "MethodSpec",
    "RiskProfile",
    "SummaryGraph",
    "TimeSeriesMatrix",
    "audit",
    "compute_risk_profile",
    "decide",
    "load_config",
    "load_series",
]
