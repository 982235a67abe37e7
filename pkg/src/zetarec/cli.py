"""Command-line front end: run configuration, result persistence, plot data.

Results append to a JSON-lines file, one self-describing record per run, so
interrupted parameter sweeps lose nothing and diffs stay readable.  Flags
override values from --config; unknown config fields are rejected.

Exit codes: 0 success, 1 usage/config error, 2 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import kronecker, scanner, torus
from .errors import ZetaRecError
from .zetaeval import CompactRect, EvalConfig

SCHEMA_VERSION = 1
_ENV_OUTDIR = "ZETAREC_OUTDIR"

# Per-subcommand parameter schemas: name -> (type, default, help).
# None defaults mean "required unless supplied via config file".
_SCHEMAS: dict[str, dict[str, tuple]] = {
    "scan": {
        "j": (int, None, "first shift multiplier (rational target)"),
        "k": (int, None, "second shift multiplier (rational target)"),
        "d": (float, None, "real shift ratio (alternative to j/k)"),
        "sigma": (str, "1.5:1.6", "sigma range lo:hi"),
        "t": (str, "0:0.2", "imaginary-part range lo:hi"),
        "grid": (str, "5x5", "grid nodes sigma x t"),
        "eps": (float, 0.5, "closeness threshold"),
        "T": (float, 1e4, "shift range upper end"),
        "samples": (int, 10000, "number of tau samples"),
        "seed": (int, 7, "RNG seed"),
        "target-error": (float, 1e-7, "evaluation accuracy"),
    },
    "curve": {
        "j": (int, None, "first shift multiplier"),
        "k": (int, None, "second shift multiplier"),
        "d": (float, None, "real shift ratio (alternative to j/k)"),
        "sigma": (str, "1.5:1.6", "sigma range lo:hi"),
        "t": (str, "0:0.2", "imaginary-part range lo:hi"),
        "grid": (str, "5x5", "grid nodes sigma x t"),
        "eps": (float, 0.5, "closeness threshold"),
        "T-schedule": (str, "1e2,1e3,1e4", "comma-separated increasing T values"),
        "samples": (int, 10000, "tau samples per T"),
        "seed": (int, 7, "RNG seed"),
        "target-error": (float, 1e-7, "evaluation accuracy"),
    },
    "kronecker": {
        "primes": (str, "2,3,5", "comma-separated primes"),
        "delta": (float, 0.5, "phase threshold in (0,2]"),
        "T": (float, 1e4, "scan range"),
        "step": (float, None, "scan step (default: the safe bound)"),
        "lattice": (bool, False, "use lattice search instead of scanning"),
        "search-bound": (float, 1e12, "lattice search bound on tau"),
    },
    "witness": {
        "j": (int, 1, "first twist power"),
        "k": (int, 2, "second twist power"),
        "sigma": (str, "1.8:2.0", "sigma range lo:hi (needs sigma_min > 1)"),
        "t": (str, "0:0.5", "imaginary-part range lo:hi"),
        "grid": (str, "6x6", "grid nodes sigma x t"),
        "eps": (float, 0.1, "witness sup target"),
        "seed": (int, 11, "RNG seed"),
        "trials": (int, 2000, "Haar trials for the support mass"),
    },
    "compare": {
        "s0": (str, "2", "comparison point, e.g. 2 or 2+0.5j"),
        "j": (int, 1, "first twist power"),
        "k": (int, 2, "second twist power"),
        "T": (float, 1e5, "shift range"),
        "tau-samples": (int, 10000, "shift ensemble size"),
        "haar-trials": (int, 10000, "Haar ensemble size"),
        "N": (int, 200, "primes in the random products"),
        "seed": (int, 7, "RNG seed"),
        "target-error": (float, 1e-7, "evaluation accuracy"),
    },
    "demo41": {
        "j": (int, None, "first shift multiplier (rational target)"),
        "k": (int, None, "second shift multiplier (rational target)"),
        "d": (float, None, "real shift ratio (alternative to j/k)"),
        "sigma": (str, "2:2.2", "sigma range lo:hi (absolute region)"),
        "t": (str, "0:0.1", "imaginary-part range lo:hi"),
        "grid": (str, "5x5", "grid nodes sigma x t"),
        "eps": (float, 0.1, "closeness budget"),
        "margin": (float, 0.05, "slack on the final 2*eps check"),
        "search-bound": (float, 1e12, "lattice search bound on tau"),
    },
    "export": {
        "records": (str, None, "JSONL results file to export"),
        "outdir": (str, None, "directory for CSV files (default: alongside)"),
    },
}

_COMMON = {
    "out": (str, None, "results file (default $ZETAREC_OUTDIR/results.jsonl)"),
    "confidence": (float, 0.95, "binomial confidence level"),
    "precision": (int, None, "mpmath digits for scalar guard evaluations"),
}


@dataclasses.dataclass(frozen=True)
class RunConfig:
    """One fully-resolved invocation; round-trips losslessly through JSON."""

    subcommand: str
    params: dict
    out: str | None = None
    confidence: float = 0.95
    precision: int | None = None

    def to_json(self) -> dict:
        return {"subcommand": self.subcommand, "params": dict(self.params),
                "out": self.out, "confidence": self.confidence,
                "precision": self.precision}

    @classmethod
    def from_json(cls, data: dict) -> "RunConfig":
        allowed = {"subcommand", "params", "out", "confidence", "precision"}
        unknown = set(data) - allowed
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        sub = data.get("subcommand")
        if sub not in _SCHEMAS:
            raise ValueError(f"unknown subcommand {sub!r}")
        params = dict(data.get("params", {}))
        bad = set(params) - set(_SCHEMAS[sub])
        if bad:
            raise ValueError(f"unknown params for {sub}: {sorted(bad)}")
        return cls(subcommand=sub, params=params, out=data.get("out"),
                   confidence=data.get("confidence", 0.95),
                   precision=data.get("precision"))


@dataclasses.dataclass(frozen=True)
class ResultRecord:
    schema_version: int
    timestamp: float
    config: dict
    payload: dict
    failures: int = 0

    def to_line(self) -> str:
        return json.dumps(dataclasses.asdict(self), sort_keys=True)


def _parse_range(text: str) -> tuple[float, float]:
    lo, _, hi = text.partition(":")
    return float(lo), float(hi)


def _parse_grid(text: str) -> tuple[int, int]:
    a, _, b = text.lower().partition("x")
    return int(a), int(b)


def _rect_from(params: dict, sigma_key="sigma", t_key="t", grid_key="grid") -> CompactRect:
    slo, shi = _parse_range(params[sigma_key])
    tlo, thi = _parse_range(params[t_key])
    gs, gt = _parse_grid(params[grid_key])
    if slo > 1:
        region = "absolute"
    elif 0.5 < slo and shi < 1:
        region = "critical-strip"
    else:
        region = None
    return CompactRect(slo, shi, tlo, thi, grid_sigma=gs, grid_t=gt, region=region)


def _target_from(params: dict) -> scanner.RecurrenceTarget:
    j, k, d = params.get("j"), params.get("k"), params.get("d")
    if d is not None:
        if j is not None or k is not None:
            raise ValueError("give either --d or --j/--k, not both")
        return scanner.RecurrenceTarget.real(float(d))
    if j is None or k is None:
        raise ValueError("target needs --j and --k, or --d")
    return scanner.RecurrenceTarget.rational(int(j), int(k))


def _estimate_payload(est: scanner.DensityEstimate) -> dict:
    return {
        "T": est.T, "samples": est.samples, "hits": est.hits,
        "failures": est.failures, "value": est.value,
        "ci_low": est.ci_low, "ci_high": est.ci_high,
        "confidence": est.confidence, "eps": est.eps,
        "target": est.target.describe(),
        "rect": [est.rect.sigma_min, est.rect.sigma_max, est.rect.t_min,
                 est.rect.t_max],
        "exploratory": est.rect.region == "critical-strip",
        "note": "finite-T observation; the limiting statement is not finitely decidable",
    }


def _run_scan(rc: RunConfig) -> tuple[dict, int]:
    p = rc.params
    cfg = scanner.ScanConfig(
        target=_target_from(p), rect=_rect_from(p), eps=p["eps"], T=p["T"],
        tau_samples=p["samples"], seed=p["seed"],
        eval=EvalConfig(target_abs_error=p["target-error"], mp_dps=rc.precision),
        confidence=rc.confidence)
    est = scanner.nu_T(cfg)
    return _estimate_payload(est), est.failures


def _run_curve(rc: RunConfig) -> tuple[dict, int]:
    p = rc.params
    schedule = [float(x) for x in p["T-schedule"].split(",")]
    cfg = scanner.ScanConfig(
        target=_target_from(p), rect=_rect_from(p), eps=p["eps"],
        T=schedule[-1], tau_samples=p["samples"], seed=p["seed"],
        eval=EvalConfig(target_abs_error=p["target-error"], mp_dps=rc.precision),
        confidence=rc.confidence)
    ests = scanner.density_curve(cfg, schedule)
    running_min = min(e.value for e in ests)
    return ({"curve": [_estimate_payload(e) for e in ests],
             "running_min": running_min},
            sum(e.failures for e in ests))


def _run_kronecker(rc: RunConfig) -> tuple[dict, int]:
    p = rc.params
    ps = tuple(int(x) for x in str(p["primes"]).split(","))
    query = kronecker.KroneckerQuery(primes=ps, delta=p["delta"])
    if p["lattice"]:
        window = kronecker.find_tau_lattice(query, p["search-bound"])
        windows = [window]
    else:
        step = p["step"] if p["step"] is not None else kronecker.max_safe_step(query)
        windows = kronecker.find_tau_scan(query, p["T"], step)
    measure = sum(w.width for w in windows)
    payload = {
        "windows": [[w.tau_lo, w.tau_hi] for w in windows],
        "certified": [w.certified for w in windows],
        "measure": measure,
        "density": measure / p["T"] if not p["lattice"] else None,
        "theoretical_density": kronecker.theoretical_density(query),
    }
    return payload, 0


def _run_witness(rc: RunConfig) -> tuple[dict, int]:
    p = rc.params
    rect = _rect_from(p)
    cfg = EvalConfig(mp_dps=rc.precision)
    w = torus.support_witness(rect, p["eps"], p["j"], p["k"], p["seed"], cfg)
    mass = torus.support_mass(rect, p["eps"], w, p["j"], p["k"],
                              trials=p["trials"], seed=p["seed"] + 1, cfg=cfg,
                              confidence=rc.confidence)
    payload = {"witness": w.summary(),
               "support_mass": {"value": mass.value, "hits": mass.hits,
                                "trials": mass.trials, "ci_low": mass.ci_low,
                                "ci_high": mass.ci_high,
                                "confidence": mass.confidence}}
    return payload, 0


def _run_compare(rc: RunConfig) -> tuple[dict, int]:
    p = rc.params
    s0 = complex(str(p["s0"]).replace(" ", ""))
    stat = scanner.compare_distributions(
        s0, p["j"], p["k"], p["T"], p["tau-samples"], p["haar-trials"],
        p["N"], p["seed"],
        EvalConfig(target_abs_error=p["target-error"], mp_dps=rc.precision))
    return ({"ks_statistic": stat, "s0": [s0.real, s0.imag], "j": p["j"],
             "k": p["k"], "T": p["T"], "tau_samples": p["tau-samples"],
             "haar_trials": p["haar-trials"], "n_primes": p["N"]}, 0)


def _run_demo41(rc: RunConfig) -> tuple[dict, int]:
    p = rc.params
    rect = _rect_from(p)
    report = scanner.recurrence_pipeline(
        rect, p["eps"], _target_from(p), search_bound=p["search-bound"],
        margin=p["margin"], cfg=EvalConfig(mp_dps=rc.precision))
    payload = {
        "tau": report.tau,
        "window": [report.window.tau_lo, report.window.tau_hi],
        "certified": report.window.certified,
        "final_sup": report.final_sup, "threshold": report.threshold,
        "chain_bound": report.chain_bound,
        "truncation_n": report.truncation_n, "tail_bound": report.tail_bound,
        "candidates_tried": report.candidates_tried,
        "stages": list(report.stages),
        "target": report.target.describe(),
    }
    return payload, 0


def export_plot_data(records: list[dict], outdir: Path) -> list[Path]:
    """Columnar CSV emission: density curves and window lists.

    Values print with repr-level precision so a re-parse reproduces them.
    """
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    curve_rows, window_rows = [], []
    for rec in records:
        payload = rec.get("payload", {})
        if "curve" in payload:
            for e in payload["curve"]:
                curve_rows.append((e["T"], e["value"], e["ci_low"], e["ci_high"]))
        elif "value" in payload and "T" in payload:
            curve_rows.append((payload["T"], payload["value"],
                               payload["ci_low"], payload["ci_high"]))
        if "windows" in payload:
            window_rows.extend(tuple(w) for w in payload["windows"])
    path = outdir / "density_curve.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["T", "nu_T", "ci_low", "ci_high"])
        for row in curve_rows:
            w.writerow([repr(float(x)) for x in row])
    written.append(path)
    path = outdir / "windows.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["tau_lo", "tau_hi"])
        for row in window_rows:
            w.writerow([repr(float(x)) for x in row])
    written.append(path)
    return written


def _run_export(rc: RunConfig) -> tuple[dict, int]:
    p = rc.params
    src = Path(p["records"])
    if not src.exists():
        raise ValueError(f"records file {src} does not exist")
    records = [json.loads(line) for line in src.read_text().splitlines() if line.strip()]
    if not records:
        raise ValueError("no records to export")
    outdir = Path(p["outdir"]) if p.get("outdir") else src.parent
    files = export_plot_data(records, outdir)
    return {"files": [str(f) for f in files]}, 0


_RUNNERS = {
    "scan": _run_scan, "curve": _run_curve, "kronecker": _run_kronecker,
    "witness": _run_witness, "compare": _run_compare, "demo41": _run_demo41,
    "export": _run_export,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zetarec",
        description="Self-approximation experiments for the Riemann zeta function")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name, schema in _SCHEMAS.items():
        sp = sub.add_parser(name)
        sp.add_argument("--config", type=str, default=None,
                        help="JSON config file; explicit flags win")
        for field, (ftype, default, helptext) in {**schema, **_COMMON}.items():
            flag = f"--{field}"
            if ftype is bool:
                sp.add_argument(flag, action="store_const", const=True,
                                default=None, help=helptext)
            else:
                sp.add_argument(flag, type=ftype, default=None, help=helptext)
    return parser


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    sub = args.subcommand
    base: dict = {"subcommand": sub, "params": {}}
    if args.config:
        with open(args.config) as fh:
            base = json.loads(fh.read())
        if base.get("subcommand", sub) != sub:
            raise ValueError("config file targets a different subcommand")
        base["subcommand"] = sub
    rc = RunConfig.from_json(base)
    params = dict(rc.params)
    schema = _SCHEMAS[sub]
    for field, (ftype, default, _) in schema.items():
        cli_val = getattr(args, field.replace("-", "_"), None)
        if cli_val is not None:
            params[field] = cli_val
        elif field not in params:
            params[field] = default
    out = args.out if args.out is not None else rc.out
    confidence = args.confidence if args.confidence is not None else rc.confidence
    precision = args.precision if args.precision is not None else rc.precision
    return RunConfig(subcommand=sub, params=params, out=out,
                     confidence=confidence, precision=precision)


def _default_out() -> Path:
    root = os.environ.get(_ENV_OUTDIR, ".")
    return Path(root) / "results.jsonl"


def run(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        rc = _resolve_config(args)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        payload, failures = _RUNNERS[rc.subcommand](rc)
    except ZetaRecError as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    record = ResultRecord(schema_version=SCHEMA_VERSION, timestamp=time.time(),
                          config=rc.to_json(), payload=payload,
                          failures=failures)
    out = Path(rc.out) if rc.out else _default_out()
    if rc.subcommand != "export":
        out.parent.mkdir(parents=True, exist_ok=True)
        with open(out, "a") as fh:
            fh.write(record.to_line() + "\n")
    print(json.dumps(payload, sort_keys=True))
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
