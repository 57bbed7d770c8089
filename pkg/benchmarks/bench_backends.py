#!/usr/bin/env python3
"""Throughput comparison of the rollout backends.

Times the closed-loop rollout kernel and the governor feasibility probe on
the reference scenario, for every importable backend (compiled Cython and
the pure-Python fallback), and prints steps/second plus the speedup.

Run:  python benchmarks/bench_backends.py [--steps N]
"""

import argparse
import math
import time

import numpy as np

from aircart import _core
from aircart.controller import ControllerState
from aircart.harness import builtin_scenarios


def time_backend(mod, cfg, n_steps):
    phys = _core.pack_physical(cfg.params)
    gains = _core.pack_gains(cfg.gains)
    lims = _core.pack_limits(cfg.limits, cfg.params)
    cs = ControllerState.create(cfg.gains, cfg.limits, cfg.params,
                                cfg.thrust_mode)
    y0 = (*cfg.initial_state.as_tuple(), 0.0)
    out = np.empty((n_steps // 50 + 1, 15))

    t0 = time.perf_counter()
    _, status, _ = mod.run_segment(y0, cfg.ref.x_d, cfg.ref.alpha_d, n_steps,
                                   cfg.dt, phys, gains, cs.gamma, 1, lims,
                                   out, 50, 0, True, False)
    t_run = time.perf_counter() - t0
    assert status == 0

    t0 = time.perf_counter()
    code = mod.check_segment(y0, cfg.ref.x_d, cfg.initial_state.alpha + 0.02,
                             n_steps, cfg.dt, phys, gains, cs.gamma, 1, lims,
                             cfg.limits.T_max, 0.98 * cfg.limits.tau_max,
                             0.98 * cfg.limits.F_max, 0.7375, 2.4041, True)
    t_check = time.perf_counter() - t0
    assert code == 0
    return t_run, t_check


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--steps", type=int, default=200000,
                    help="kernel steps per measurement (default 200000)")
    args = ap.parse_args()

    cfg = builtin_scenarios()["rg"]
    backends = _core.available_backends()
    print(f"active backend: {_core.backend_name()}")
    print(f"{args.steps} steps at dt={cfg.dt}:")
    results = {}
    for name, mod in sorted(backends.items()):
        t_run, t_check = time_backend(mod, cfg, args.steps)
        results[name] = (t_run, t_check)
        print(f"  {name:9s} rollout {args.steps / t_run / 1e6:7.2f} Msteps/s"
              f"   probe {args.steps / t_check / 1e6:7.2f} Msteps/s")
    if len(results) == 2:
        r = results["python"][0] / results["compiled"][0]
        c = results["python"][1] / results["compiled"][1]
        print(f"  speedup compiled/python: rollout {r:.0f}x, probe {c:.0f}x")


if __name__ == "__main__":
    main()
