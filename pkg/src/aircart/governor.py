"""Simulation-based scalar reference governor.

Set-points are filtered along the segment from the currently applied
reference toward the desired one: each update picks the largest step
fraction c in [0, 1] whose resulting reference, held constant, keeps the
predicted closed loop inside (margin-shrunk) input bounds over a finite
horizon. The prediction reuses the exact plant/controller kernel, so there
is no model mismatch; c is found by left-biased bisection, and only a
c value that actually passed the feasibility probe is ever returned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import _core
from .controller import ControllerState
from .dynamics import ActuatorLimits, PhysicalParams, SystemState
from .equilibrium import attainable_alpha_range

__all__ = ["RGConfig", "AppliedReference", "RGDecision",
           "predict_feasible", "rg_step"]


@dataclass(frozen=True)
class RGConfig:
    t_s: float = 0.2                    # update period [s]
    t_h: float = 15.0                   # prediction horizon [s]
    dt: float = 5e-4                    # prediction integration step [s]
    bisection_iters: int = 10
    margin_u: float = 0.02              # fractional shrink of input bounds
    enforce_alpha_range: bool = True    # also confine predicted alpha
    alpha_margin: float = 0.02          # [rad], inside the attainable arc

    def __post_init__(self):
        if not self.t_s > 0.0:
            raise ValueError("t_s must be positive")
        if self.t_h < self.t_s:
            raise ValueError("t_h must be at least t_s")
        if not 0.0 < self.dt <= self.t_s:
            raise ValueError("dt must lie in (0, t_s]")
        if self.bisection_iters < 1:
            raise ValueError("bisection_iters must be at least 1")
        if self.margin_u < 0.0 or self.alpha_margin < 0.0:
            raise ValueError("margins must be non-negative")


@dataclass(frozen=True)
class AppliedReference:
    x_a: float
    alpha_a: float


@dataclass(frozen=True)
class RGDecision:
    ref: AppliedReference
    c: float
    applied_feasible: bool  # False only when even holding the reference fails


def predict_feasible(s: SystemState, cs: ControllerState,
                     ref: AppliedReference, cfg: RGConfig, g, p: PhysicalParams,
                     lim: ActuatorLimits) -> bool:
    """Hold ``ref`` constant for the horizon; True iff the raw commanded
    inputs stay inside the margin-shrunk bounds (and, when enabled, alpha
    stays inside the shrunk attainable arc) at every prediction sample.

    The thrust margin applies only under the desired-angle law, whose
    command is unbounded. The feedforward law caps its own command at
    T_max and pins it there whenever the relative attitude crosses zero
    with a nonzero force request; a shrunk bound on that channel would
    declare every reference change infeasible (including holding the
    initial upright pose), emptying the feasible set."""
    y = (*s.as_tuple(), cs.integral_alpha)
    n = int(round(cfg.t_h / cfg.dt))
    shrink = 1.0 - cfg.margin_u
    u1_hi = shrink * lim.T_max if cs.mode == "desired_angle" else lim.T_max
    if cfg.enforce_alpha_range:
        rng = attainable_alpha_range(p, lim)
        alo = rng.alpha_min + cfg.alpha_margin
        ahi = rng.alpha_max - cfg.alpha_margin
    else:
        alo, ahi = -math.inf, math.inf
    status = _core.check_segment(
        y, ref.x_a, ref.alpha_a, n, cfg.dt,
        _core.pack_physical(p), _core.pack_gains(g),
        cs.gamma, _core.mode_id(cs.mode), _core.pack_limits(lim, p),
        u1_hi, shrink * lim.tau_max, shrink * lim.F_max,
        alo, ahi, cfg.enforce_alpha_range)
    return status == 0


def rg_step(s: SystemState, cs: ControllerState, ref_applied: AppliedReference,
            ref_desired, cfg: RGConfig, g, p: PhysicalParams,
            lim: ActuatorLimits) -> RGDecision:
    """One governor update.

    Returns the blend (1-c)*applied + c*desired for the largest verified
    feasible c (left-biased bisection, ``bisection_iters`` halvings after
    the initial c=1 probe). c=0 is legitimate; an infeasible c=0 (the
    standing assumption is violated) is flagged and the reference held.
    """
    x_d, alpha_d = ref_desired

    def blend(c: float) -> AppliedReference:
        return AppliedReference((1.0 - c) * ref_applied.x_a + c * x_d,
                                (1.0 - c) * ref_applied.alpha_a + c * alpha_d)

    def feasible(c: float) -> bool:
        return predict_feasible(s, cs, blend(c), cfg, g, p, lim)

    if x_d == ref_applied.x_a and alpha_d == ref_applied.alpha_a:
        return RGDecision(ref_applied, 1.0, True)
    if feasible(1.0):
        return RGDecision(blend(1.0), 1.0, True)
    lo, hi = 0.0, 1.0
    verified = False
    for _ in range(cfg.bisection_iters):
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            lo = mid
            verified = True
        else:
            hi = mid
    if not verified:
        ok = feasible(0.0)
        return RGDecision(ref_applied, 0.0, ok)
    return RGDecision(blend(lo), lo, True)
