"""Command-line entry points: audit, calibrate, generate-atlas, evaluate, decide.

Every command writes its outputs through temporary files and renames them
into place only after all payloads are computed, so a failing run leaves
earlier outputs untouched. Abstention is a normal result and exits 0.

Exit codes: 0 success (Recommend or Abstain), 2 usage or generic pipeline
error, and the ``exit_code`` of the raised :class:`~tsaudit.errors.AuditError`
subclass otherwise (3 for unreadable input).
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
import tempfile
from pathlib import Path
from typing import Any, Mapping, Sequence

import yaml

from .core import AuditConfig, load_config, load_series
from .decision import catalog_from_config, decide
from .errors import AuditError, ParseError
from .risk import DIMENSIONS, Calibration, RiskProfile, compute_risk_profile

log = logging.getLogger("tsaudit")

DEFAULT_SEED = 0
DEFAULT_ATLAS_COUNT = 50


def dumps(obj: Any) -> str:
    """Canonical JSON: sorted keys, NaN and inf mapped to null."""
    return json.dumps(_finite(obj), indent=2, sort_keys=True) + "\n"


def _finite(obj):
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {str(k): _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    return obj


def write_all(files: Mapping[Path, str]) -> None:
    """Write several text files so that none is replaced unless all are staged."""
    staged = []
    try:
        for path, text in files.items():
            path.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
            with os.fdopen(fd, "w") as fh:
                fh.write(text)
            staged.append((tmp, path))
    except BaseException:
        for tmp, _ in staged:
            os.unlink(tmp)
        raise
    for tmp, path in staged:
        os.replace(tmp, path)


# ------------------------------------------------------------------ config

def resolve_config(args: argparse.Namespace) -> tuple[AuditConfig, dict]:
    """CLI flags override the YAML ``audit`` section, which overrides defaults."""
    cfg, doc = load_config(getattr(args, "config", None))
    over = {
        "seed": getattr(args, "seed", None),
        "n_bootstrap": getattr(args, "n_bootstrap", None),
        "alpha": getattr(args, "alpha", None),
        "max_lag": getattr(args, "max_lag", None),
        "period_hint": getattr(args, "period_hint", None),
    }
    return cfg.with_overrides(**over), doc


def resolve_calibration(path: str | None, doc: Mapping) -> Calibration:
    if path:
        return Calibration.load_yaml(path)
    if doc.get("calibration"):
        return Calibration.from_dict(doc["calibration"])
    return Calibration.default()


# ---------------------------------------------------------------- commands

def cmd_audit(args: argparse.Namespace) -> int:
    from .diagnostics import audit

    cfg, doc = resolve_config(args)
    calibration = resolve_calibration(args.calibration, doc)
    catalog = catalog_from_config(doc)
    series = load_series(args.series, args.format)
    report = audit(series, cfg, include_nonlinearity=not args.no_nonlinearity)
    profile = compute_risk_profile(report, calibration, cfg)
    decision = decide(profile, catalog, cfg)
    policy = {**decision.to_json_dict(),
              "catalog": [m.to_dict() for m in catalog],
              "config": cfg.to_dict()}
    out = Path(args.out)
    write_all({
        out / "audit_evidence.json": dumps(report.to_json_dict()),
        out / "risk_profile.json": dumps(profile.to_json_dict()),
        out / "recommendation_policy.json": dumps(policy),
    })
    log.info("%s: %s %s", args.series, decision.outcome, decision.method or ",".join(decision.reasons))
    print(dumps({"decision": decision.outcome, "method": decision.method,
                 "reasons": list(decision.reasons)}), end="")
    return 0


def cmd_generate_atlas(args: argparse.Namespace) -> int:
    from .atlas import generate_atlas, write_atlas

    out = Path(args.out)
    if (out / "manifest.json").exists() and not args.force:
        raise ParseError(f"{out} already holds an atlas; pass --force to overwrite")
    entries, manifest = generate_atlas(args.seed, args.count)
    write_atlas(entries, manifest, out)
    log.info("wrote %d entries to %s", len(entries), out)
    return 0


def cmd_calibrate(args: argparse.Namespace) -> int:
    from .eval import calibrate_atlas

    cfg, _ = resolve_config(args)
    cal = calibrate_atlas(args.atlas, cfg, args.split_seed)
    write_all({Path(args.out): yaml.safe_dump({"calibration": cal.to_dict()}, sort_keys=False)})
    log.info("calibration written to %s", args.out)
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    from .eval import run_benchmark, write_bins_csv

    cfg, _ = resolve_config(args)
    cal = Calibration.load_yaml(args.calibration) if args.calibration else None
    report = run_benchmark(args.atlas, cfg, args.split_seed, cal, include_runtime=not args.no_runtime)
    files = {Path(args.out): dumps(report)}
    if args.bins_csv:
        # render the CSV into a scratch file first so both land together
        with tempfile.TemporaryDirectory() as tmp:
            p = Path(tmp) / "bins.csv"
            write_bins_csv(report, p)
            files[Path(args.bins_csv)] = p.read_text()
    write_all(files)
    sel = report["selective"] or {}
    log.info("holdout coverage %s, selective failure rate %s", sel.get("coverage"), sel.get("failure_rate"))
    return 0


def _profile_from_json(obj: Mapping) -> RiskProfile:
    if all(isinstance(obj.get(d), Mapping) for d in DIMENSIONS):
        return RiskProfile.from_json_dict(obj)
    if all(isinstance(obj.get(d), (int, float)) for d in DIMENSIONS):
        return RiskProfile.from_points([float(obj[d]) for d in DIMENSIONS],
                                       t_eff_ratio=float(obj.get("t_eff_ratio", 1.0)),
                                       widths=float(obj.get("width", 0.0)))
    raise ParseError(f"risk profile needs the keys {list(DIMENSIONS)}")


def cmd_decide(args: argparse.Namespace) -> int:
    from .fixtures import evaluate_fixtures

    cfg, doc = resolve_config(args)
    catalog = catalog_from_config(doc)
    if args.fixtures:
        payload = evaluate_fixtures(catalog, cfg)
    else:
        path = Path(args.risk_profile)
        try:
            obj = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ParseError(f"{path}: {exc}") from exc
        payload = decide(_profile_from_json(obj), catalog, cfg).to_json_dict()
    text = dumps(payload)
    if args.out:
        write_all({Path(args.out): text})
    else:
        sys.stdout.write(text)
    return 0


# ------------------------------------------------------------------ parser

def _add_common(p: argparse.ArgumentParser, seed: bool = True) -> None:
    p.add_argument("--config", help="YAML file with audit/methods/calibration sections")
    if seed:
        p.add_argument("--seed", type=int, default=None,
                       help=f"bootstrap seed (default: config value, else {DEFAULT_SEED})")
    p.add_argument("--n-bootstrap", type=int, default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--max-lag", type=int, default=None)
    p.add_argument("--period-hint", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tsaudit", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="count", default=0)
    # also accepted after the subcommand; SUPPRESS keeps the top-level count
    verb = argparse.ArgumentParser(add_help=False)
    verb.add_argument("-v", "--verbose", action="count", default=argparse.SUPPRESS)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("audit", parents=[verb], help="diagnose one panel and recommend a method or abstain")
    p.add_argument("series", help="CSV (first column time) or JSON matrix file")
    p.add_argument("--out", required=True, help="directory for the three JSON artifacts")
    p.add_argument("--calibration", help="calibration YAML (default: config section, else expert weights)")
    p.add_argument("--format", choices=["csv", "json"], default=None)
    p.add_argument("--no-nonlinearity", action="store_true", help="skip the forest-based check")
    _add_common(p)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("generate-atlas", parents=[verb], help="simulate the synthetic benchmark")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"master seed (default {DEFAULT_SEED})")
    p.add_argument("--count", type=int, default=DEFAULT_ATLAS_COUNT, help="entries per family")
    p.add_argument("--out", required=True)
    p.add_argument("--force", action="store_true", help="overwrite an existing atlas")
    p.set_defaults(func=cmd_generate_atlas)

    p = sub.add_parser("calibrate", parents=[verb], help="fit risk models on an atlas calibration split")
    p.add_argument("--atlas", required=True)
    p.add_argument("--out", required=True, help="calibration YAML")
    p.add_argument("--split-seed", type=int, default=0)
    _add_common(p, seed=False)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("evaluate", parents=[verb], help="benchmark report on the atlas holdout")
    p.add_argument("--atlas", required=True)
    p.add_argument("--calibration", help="use this calibration instead of refitting")
    p.add_argument("--out", required=True, help="report JSON")
    p.add_argument("--bins-csv", help="also write reliability-diagram bins")
    p.add_argument("--split-seed", type=int, default=0)
    p.add_argument("--no-runtime", action="store_true", help="omit timings so reruns are byte-identical")
    _add_common(p, seed=False)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("decide", parents=[verb], help="decision for a literal risk profile")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--risk-profile", help="JSON risk profile (full or point form)")
    g.add_argument("--fixtures", action="store_true", help="score the built-in reference profiles")
    p.add_argument("--out", help="write JSON here instead of stdout")
    _add_common(p, seed=False)
    p.set_defaults(func=cmd_decide)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except AuditError as exc:
        print(f"tsaudit: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except (OSError, ValueError, KeyError, yaml.YAMLError) as exc:
        print(f"tsaudit: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
