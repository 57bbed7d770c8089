"""Rollout backend selection and argument packing.

The hot loops (closed-loop rollout, governor feasibility probes, open-loop
plant runs) live in a compiled Cython kernel when available, with a pure
Python twin as fallback. Selection happens once at import; both backends
share the packed-tuple ABI documented in ``_pyloop`` and produce
bit-identical results.
"""

from __future__ import annotations

import os

from . import _pyloop

try:
    from . import _fastloop  # compiled extension, may be absent
except ImportError:  # pragma: no cover - depends on the build
    _fastloop = None

if os.environ.get("AIRCART_PURE_PYTHON") == "1":
    _impl = _pyloop
else:
    _impl = _fastloop if _fastloop is not None else _pyloop

run_segment = _impl.run_segment
check_segment = _impl.check_segment
run_plant = _impl.run_plant


def backend_name() -> str:
    """Name of the active backend: "compiled" or "python"."""
    return _impl.BACKEND_NAME


def available_backends() -> dict:
    """All importable backends keyed by name (for tests and benchmarks)."""
    out = {"python": _pyloop}
    if _fastloop is not None:
        out["compiled"] = _fastloop
    return out


# Column order of the per-row record written by run_segment.
SEGMENT_COLUMNS = ("x", "x_dot", "alpha", "alpha_dot", "beta", "beta_dot",
                   "u1", "u2", "u3", "u1_unsat", "u2_unsat", "u3_unsat",
                   "f_t", "theta_d", "beta_d")


def pack_physical(p) -> tuple:
    mal = p.M_a * p.L
    return (p.M_t, mal, p.I_0 * p.L, p.I_a,
            p.zeta_x, p.zeta_alpha, p.zeta_beta, p.g, p.L, mal * p.g)


def pack_gains(g) -> tuple:
    return (g.k_px, g.k_vx, g.k_palpha, g.k_valpha,
            g.k_pbeta, g.k_vbeta, g.epsilon, g.k_i, g.i_sat)


def pack_limits(lim, p) -> tuple:
    return (lim.T_max, lim.tau_max, lim.F_max, lim.T_max * p.L)


def mode_id(mode: str) -> int:
    return 0 if mode == "desired_angle" else 1
