"""Map raw diagnostic statistics onto named feature slots in [0, 1]."""
from __future__ import annotations

import math

from ..core import FeatureAnchors

FEATURE_NAMES = (
    "x_adf",
    "x_kpss",
    "x_break_mag",
    "x_drift",
    "x_gap_cv",
    "x_missing",
    "x_seasonal_miss",
    "x_teff_ratio",
    "x_tau_int",
    "x_chow",
    "x_resid_var",
    "x_vif",
)


def _unit(v: float) -> float:
    return min(max(v, 0.0), 1.0)


def _finite(values) -> list[float]:
    return [float(v) for v in values if v is not None and math.isfinite(v)]


def normalize_features(stationarity, irregularity, persistence, confounding,
                       anchors: FeatureAnchors | None = None) -> tuple[dict[str, float], list[str]]:
    """Return ``(features, flags)``.

    Slots whose inputs are degenerate are set to 0 and named in ``flags``.
    ``x_teff_ratio`` is passed through unscaled.
    """
    a = anchors or FeatureAnchors()
    flags: list[str] = []
    x: dict[str, float] = {}

    adf = _finite(stationarity.adf_corrected)
    kpss = _finite(stationarity.kpss_corrected)
    if adf:
        x["x_adf"] = _unit(max(adf))
    else:
        x["x_adf"] = 0.0
        flags.append("x_adf:degenerate")
    if kpss:
        x["x_kpss"] = _unit(1.0 - min(kpss))
    else:
        x["x_kpss"] = 0.0
        flags.append("x_kpss:degenerate")
    x["x_break_mag"] = _unit(stationarity.break_magnitude / a.break_mag_sd)
    z = _finite(abs(v) for v in stationarity.drift_slope_z)
    x["x_drift"] = _unit(max(z) / a.drift_z) if z else 0.0

    x["x_gap_cv"] = _unit(irregularity.gap_cv)
    x["x_missing"] = _unit(irregularity.missing_fraction / a.missing_fraction)
    x["x_seasonal_miss"] = _unit(1.0 - irregularity.seasonal_missing_pvalue)

    ratio = persistence.t_eff_ratio
    if not (0.0 < ratio <= 1.0):
        flags.append("x_teff_ratio:degenerate")
        ratio = min(max(ratio, 1e-12), 1.0)
    x["x_teff_ratio"] = float(ratio)
    x["x_tau_int"] = _unit(max(persistence.tau_int) / a.tau_int)

    x["x_chow"] = _unit(1.0 - confounding.chow_pvalue)
    inst = confounding.resid_var_instability
    if math.isinf(inst):
        x["x_resid_var"] = 1.0
        flags.append("x_resid_var:zero-variance-window")
    else:
        x["x_resid_var"] = _unit(math.log(max(inst, 1.0)) / math.log(a.resid_var_ratio))
    vif_max = max(confounding.vif) if confounding.vif else 1.0
    x["x_vif"] = _unit(math.log10(max(vif_max, 1.0)) / a.vif_log10)
    if confounding.vif_capped:
        flags.append("x_vif:capped")
    return {k: x[k] for k in FEATURE_NAMES}, flags
