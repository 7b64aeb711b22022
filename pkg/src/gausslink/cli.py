"""Command-line interface.

    gausslink threshold-vs-da   [--config F] [--preset P] [--out PATH] ...
    gausslink threshold-vs-loss [--config F] [--preset P] [--out PATH] ...
    gausslink device-run        [--config F] [--preset P] [--out PATH] ...
    gausslink ebit-rate         [--config F] [--preset P] [--out PATH] ...
    gausslink validate          [--config F] [--seed N] [--quick]

Sweep commands write CSV (with provenance comment lines); ebit-rate and
validate emit JSON.  Exit codes: 0 success, 1 validation failure,
2 configuration error.

Conventions: squeezing dB = 10*log10(e**(2r)); loss dB = -10*log10(tau).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys

from .experiments import (
    ExperimentConfig,
    cmd_device_run,
    cmd_ebit_rate,
    cmd_threshold_vs_da,
    cmd_threshold_vs_loss,
    cmd_validate,
)
from .presets import PRESETS
from .transducer import DeviceCaps, PhysicalRates

_CAPS_KEYS = {"d_a", "d_b", "tau_a", "tau_b", "n_th"}
_RATE_KEYS = {"kappa_a", "kappa_b", "gamma_m"}


class ConfigError(ValueError):
    pass


def _caps_from_dict(d: dict) -> DeviceCaps:
    unknown = set(d) - _CAPS_KEYS - _RATE_KEYS
    if unknown:
        raise ConfigError(f"unknown caps fields: {sorted(unknown)}")
    missing = _CAPS_KEYS - set(d)
    if missing:
        raise ConfigError(f"missing caps fields: {sorted(missing)}")
    rates = (
        PhysicalRates(d["kappa_a"], d["kappa_b"], d["gamma_m"])
        if _RATE_KEYS <= set(d)
        else DeviceCaps.__dataclass_fields__["rates"].default
    )
    return DeviceCaps(
        d_a=d["d_a"], d_b=d["d_b"], tau_a=d["tau_a"], tau_b=d["tau_b"],
        n_th=d["n_th"], rates=rates,
    )


def _load_config(args) -> ExperimentConfig:
    cfg = ExperimentConfig()
    if args.preset:
        if args.preset not in PRESETS:
            raise ConfigError(f"unknown preset {args.preset!r}; available: {sorted(PRESETS)}")
        preset = PRESETS[args.preset]
        cfg.caps = preset["caps"]
        cfg.squeezing_db = tuple(preset["squeezing_db"])
        cfg.fiber_km = preset["fiber_km"]
        cfg.loss_db_per_km = preset["loss_db_per_km"]
        cfg.bandwidth_hz = preset["bandwidth_hz"]
    if args.config:
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        valid = {f.name for f in dataclasses.fields(ExperimentConfig)}
        for key, value in data.items():
            if key == "caps":
                cfg.caps = _caps_from_dict(value)
            elif key in valid:
                current = getattr(cfg, key)
                if isinstance(current, tuple):
                    value = tuple(value)
                setattr(cfg, key, value)
            else:
                raise ConfigError(f"unknown config key {key!r}")
    for key in ("out", "seed", "jobs", "points"):
        value = getattr(args, key, None)
        if value is not None:
            setattr(cfg, key, value)
    if getattr(args, "quick", False):
        cfg.checks_n = 2000
    return cfg


def _print_validation(report: dict) -> None:
    width = max(len(r["check"]) for r in report["results"])
    print(f"validation (seed={report['seed']})")
    for r in report["results"]:
        status = "PASS" if r["pass"] else "FAIL"
        detail = f"  [{r['detail']}]" if r["detail"] and not r["pass"] else ""
        print(
            f"  {status}  {r['check']:<{width}}  n={r['n']:<7d} "
            f"worst={r['worst']:.3e}  tol={r['tolerance']:.0e}{detail}"
        )
    print("overall:", "PASS" if report["pass"] else "FAIL")


def main(argv=None) -> int:
    conventions = "Squeezing dB = 10*log10(e**(2r)); loss dB = -10*log10(tau)."
    parser = argparse.ArgumentParser(
        prog="gausslink",
        description="Transducer-network entanglement sweeps and validation.",
        epilog=conventions,
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("threshold-vs-da", "thresholds vs maximum optical cooperativity (CSV)"),
        ("threshold-vs-loss", "thresholds vs optical loss, with log-log slopes (CSV)"),
        ("device-run", "optimized log-negativity vs external loss at a device preset (CSV)"),
        ("ebit-rate", "e-bit rate estimate over fiber (JSON)"),
        ("validate", "run the oracle/property suite (JSON report)"),
    ):
        p = sub.add_parser(name, help=help_text, epilog=conventions)
        p.add_argument("--config", help="JSON config file mirroring ExperimentConfig")
        p.add_argument("--preset", help="named device preset, e.g. brubaker2022")
        p.add_argument("--out", help="output path (CSV or JSON)")
        p.add_argument("--seed", type=int, help="seed for randomized sweeps")
        p.add_argument("--jobs", type=int, help="parallel workers for sweep points")
        if name != "ebit-rate":
            p.add_argument("--points", type=int, help="sweep grid size")
        if name == "validate":
            p.add_argument("--quick", action="store_true", help="reduced draw counts")
    args = parser.parse_args(argv)

    try:
        cfg = _load_config(args)
        cfg.experiment = args.command
        if args.command in ("device-run", "ebit-rate") and cfg.caps is None:
            cfg.caps = PRESETS["brubaker2022"]["caps"]
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    if args.command == "threshold-vs-da":
        rows, text = cmd_threshold_vs_da(cfg)
        if not cfg.out:
            sys.stdout.write(text)
    elif args.command == "threshold-vs-loss":
        rows, slopes, text = cmd_threshold_vs_loss(cfg)
        if not cfg.out:
            sys.stdout.write(text)
        else:
            clean = {k: (None if math.isnan(v) else v) for k, v in slopes.items()}
            print(json.dumps({"slopes": clean}, indent=2, sort_keys=True))
    elif args.command == "device-run":
        rows, text = cmd_device_run(cfg)
        if not cfg.out:
            sys.stdout.write(text)
    elif args.command == "ebit-rate":
        report = cmd_ebit_rate(cfg)
        print(json.dumps(report, indent=2, sort_keys=True))
    elif args.command == "validate":
        code, report = cmd_validate(cfg)
        _print_validation(report)
        return code
    return 0


if __name__ == "__main__":
    sys.exit(main())
