"""Command-line front end.

Subcommands: ``simulate`` (run one scenario, print metrics, optionally
export the log), ``scenarios`` (list or batch-run the built-in set),
``equilibria`` (attainable ranges and steady-state inputs), ``gains``
(stability-certificate report) and ``validate`` (hard configuration checks).

Exit codes: 0 success, 1 usage/config error, 2 runtime failure,
3 validation failure.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

from . import harness, stability
from .equilibrium import (attainable_alpha_range, attainable_beta_range,
                          desired_beta, steady_state_inputs)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2
EXIT_VALIDATION = 3


def _add_config_args(sp):
    sp.add_argument("--scenario", help="built-in scenario name")
    sp.add_argument("--config", help="scenario file path")
    sp.add_argument("--set", dest="overrides", action="append", default=[],
                    metavar="KEY=VALUE", help="override a config key (repeatable)")


def _resolve_config(args, default_scenario=None):
    """Build the ScenarioConfig from --scenario/--config plus overrides."""
    name = args.scenario
    if name is None and args.config is None:
        if default_scenario is None:
            raise ValueError("one of --scenario or --config is required")
        name = default_scenario
    if name is not None and args.config is not None:
        raise ValueError("--scenario and --config are mutually exclusive")
    if name is not None:
        scenarios = harness.builtin_scenarios()
        if name not in scenarios:
            raise ValueError(f"unknown scenario {name!r}; available: "
                             + ", ".join(sorted(scenarios)))
        cfg = scenarios[name]
    else:
        cfg = harness.load_scenario(args.config)
    if args.overrides:
        cfg = harness.apply_overrides(cfg, args.overrides)
    return cfg


def _hard_check_failures(cfg) -> list:
    """Validation failures beyond what the dataclasses already enforce."""
    failures = []
    rng = attainable_alpha_range(cfg.params, cfg.limits)
    if not rng.contains(cfg.ref.alpha_d, open_interval=True):
        failures.append(
            f"desired_ref.alpha_d = {cfg.ref.alpha_d:.6g} outside the open "
            f"attainable interval ({rng.alpha_min:.6g}, {rng.alpha_max:.6g})")
    if cfg.rg is not None and cfg.rg.dt > cfg.dt * round(cfg.rg.t_s / cfg.dt):
        failures.append("rg.dt exceeds the governor period")
    return failures


def cmd_simulate(args) -> int:
    try:
        cfg = _resolve_config(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    failures = _hard_check_failures(cfg)
    if failures:
        for f in failures:
            print(f"validation failure: {f}", file=sys.stderr)
        return EXIT_VALIDATION
    log, metrics = harness.run_scenario(cfg)
    if args.out:
        harness.export_log(log, args.out, args.format)
    print(f"status = {log.status}")
    print(f"samples = {len(log)}")
    for line in metrics.summary_lines():
        print(line)
    if log.status == "blowup":
        return EXIT_RUNTIME
    return EXIT_OK


def cmd_scenarios(args) -> int:
    scenarios = harness.builtin_scenarios()
    if not args.run:
        for name, cfg in scenarios.items():
            rg = "rg" if cfg.rg is not None else "--"
            print(f"{name:16s} T_max={cfg.limits.T_max:<5g} "
                  f"mode={cfg.thrust_mode:13s} {rg} t_end={cfg.t_end:g}")
        return EXIT_OK
    if args.out_dir:
        os.makedirs(args.out_dir, exist_ok=True)
    worst = EXIT_OK
    for name, cfg in scenarios.items():
        log, metrics = harness.run_scenario(cfg)
        print(f"[{name}] status={log.status} "
              f"ise_alpha={metrics.ise_alpha:.4g} iae_alpha={metrics.iae_alpha:.4g} "
              f"violations={metrics.constraint_violations}")
        if args.out_dir:
            harness.export_log(log, f"{args.out_dir}/{name}.csv")
        if log.status == "blowup":
            worst = EXIT_RUNTIME
    return worst


def cmd_equilibria(args) -> int:
    try:
        cfg = _resolve_config(args, default_scenario="feedforward")
        if args.t_max is not None:
            cfg = harness.apply_overrides(cfg, [f"limits.T_max={args.t_max}"])
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    p, lim = cfg.params, cfg.limits
    rng = attainable_alpha_range(p, lim)
    print(f"alpha_min = {rng.alpha_min:.6g}")
    print(f"alpha_max = {rng.alpha_max:.6g}")
    if args.alpha is None:
        return EXIT_OK
    a = args.alpha
    if not rng.contains(a):
        print(f"error: alpha = {a:.6g} is not attainable with "
              f"T_max = {lim.T_max:g}", file=sys.stderr)
        return EXIT_USAGE
    beta = attainable_beta_range(a, p, lim)
    print(f"beta_min = {beta.beta_min:.6g}")
    print(f"beta_max = {beta.beta_max:.6g}")
    interior = rng.contains(a, open_interval=True)
    if args.beta is not None:
        b = args.beta
    elif interior:
        # the attitude the controller's mapping would hold here
        b = desired_beta(a, cfg.gains, p, lim)
    else:
        b = a + math.pi / 2.0
    u = steady_state_inputs(a, b, p)
    print(f"beta = {b:.6g}")
    print(f"u1 = {u.u1:.6g}")
    print(f"u2 = {u.u2:.6g}")
    print(f"u3 = {u.u3:.6g}")
    if interior:
        print(f"beta_d = {desired_beta(a, cfg.gains, p, lim):.6g}")
    return EXIT_OK


def cmd_gains(args) -> int:
    try:
        cfg = _resolve_config(args, default_scenario="feedforward")
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    cert = stability.compute_certificate(cfg.params, cfg.gains, xi=args.xi)
    for line in stability.report_lines(cert):
        print(line)
    return EXIT_OK


def cmd_validate(args) -> int:
    try:
        cfg = _resolve_config(args, default_scenario="feedforward")
    except ValueError as exc:
        print(f"validation failure: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    failures = _hard_check_failures(cfg)
    for f in failures:
        print(f"validation failure: {f}", file=sys.stderr)
    if failures:
        return EXIT_VALIDATION
    print("ok")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="aircart",
        description="Planar UAV + ground-vehicle rod manipulation: "
                    "simulation, equilibria, certificates, governor.")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("simulate", help="run one scenario and print metrics")
    _add_config_args(sp)
    sp.add_argument("--out", help="write the trajectory log here")
    sp.add_argument("--format", default="csv", choices=["csv"])
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("scenarios", help="list or run the built-in scenarios")
    sp.add_argument("--run", action="store_true")
    sp.add_argument("--out-dir", help="export each log into this directory")
    sp.set_defaults(func=cmd_scenarios)

    sp = sub.add_parser("equilibria", help="attainable ranges, steady inputs")
    _add_config_args(sp)
    sp.add_argument("--t-max", type=float, help="override the thrust ceiling")
    sp.add_argument("--alpha", type=float, help="query this steady inclination")
    sp.add_argument("--beta", type=float,
                    help="steady attitude (default: alpha + pi/2)")
    sp.set_defaults(func=cmd_equilibria)

    sp = sub.add_parser("gains", help="print the stability certificate")
    _add_config_args(sp)
    sp.add_argument("--xi", type=float, default=0.1,
                    help="restriction margin [rad]")
    sp.set_defaults(func=cmd_gains)

    sp = sub.add_parser("validate", help="hard configuration checks")
    _add_config_args(sp)
    sp.set_defaults(func=cmd_validate)
    return ap


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # runtime failures (blow-ups, I/O)
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
