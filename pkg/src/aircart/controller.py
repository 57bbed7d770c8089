"""Cascade control laws for the rod-manipulation team.

Cart loop: a PD force law steers the rod foot to the applied position
reference. UAV loop: an inner attitude PD tracks a desired attitude produced
by the outer inclination loop, which is a PD with gravity compensation whose
output is a tangential-force request ``f_t``.

The outer loop realizes ``f_t`` through a saturating arctan mapping

    theta_d = sat_{pi/2}(gamma * atan(epsilon * f_t)),   beta_d = alpha + theta_d

with ``gamma = pi / (2 atan(epsilon * T_max * L))``. That choice makes the
mapping hit theta_d = pi/2 exactly when f_t = T_max*L, so the commanded
thrust never exceeds its ceiling at any attainable equilibrium, for every
epsilon > 0 (gamma*atan(eps*f) is convex on [0, T_max*L] while the minimal
admissible angle asin(f/(T_max*L)) is concave, and they meet at both ends).

Two thrust laws are provided:

* ``desired_angle``  -- u_n = f_t / sin(theta_d); always positive, with the
  removable singularity at f_t = 0 evaluating to 1/(gamma*epsilon).
* ``feedforward``    -- u_n = possat_{T_max*L}(f_t / sin(theta)); divides by
  the measured relative attitude instead, which damps the response to
  attitude error (the induced error gain is at most one).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .dynamics import ActuatorLimits, Inputs, PhysicalParams, SystemState

__all__ = [
    "ControlGains",
    "ControllerState",
    "ControlOutput",
    "MODE_DESIRED_ANGLE",
    "MODE_FEEDFORWARD",
    "sat",
    "pos_sat",
    "ugv_control",
    "tangential_force",
    "gamma_param",
    "theta_map",
    "thrust_desired_angle",
    "thrust_feedforward",
    "attitude_control",
    "compute_control",
    "effective_attitude_error",
]

MODE_DESIRED_ANGLE = "desired_angle"
MODE_FEEDFORWARD = "feedforward"

_PI_2 = math.pi / 2.0


@dataclass(frozen=True)
class ControlGains:
    """PD gains of both loops plus the arctan-mapping steepness epsilon.

    k_i/i_sat add a clamped integral term on the inclination error (used to
    mirror the hardware runs; zero by default). The tuning guidance
    k_px > k_palpha, k_vx > k_valpha is advisory: violations warn, not raise.
    """

    k_px: float
    k_vx: float
    k_palpha: float
    k_valpha: float
    k_pbeta: float
    k_vbeta: float
    epsilon: float
    k_i: float = 0.0
    i_sat: float = 0.5

    def __post_init__(self):
        for name in ("k_px", "k_vx", "k_palpha", "k_valpha",
                     "k_pbeta", "k_vbeta", "epsilon"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be strictly positive")
        if self.k_i < 0.0 or self.i_sat < 0.0:
            raise ValueError("k_i and i_sat must be non-negative")
        if not (self.k_px > self.k_palpha and self.k_vx > self.k_valpha):
            warnings.warn("recommended gain ordering k_px > k_palpha and "
                          "k_vx > k_valpha is not satisfied", stacklevel=2)


@dataclass
class ControllerState:
    """Mutable per-controller-instance state.

    ``gamma`` is derived from (epsilon, T_max, L); rebuild the state via
    :meth:`create` whenever either changes. A single instance must not be
    shared across threads.
    """

    gamma: float
    mode: str = MODE_FEEDFORWARD
    integral_alpha: float = 0.0

    def __post_init__(self):
        if self.mode not in (MODE_DESIRED_ANGLE, MODE_FEEDFORWARD):
            raise ValueError(f"unknown thrust mode {self.mode!r}")

    @classmethod
    def create(cls, gains: ControlGains, lim: ActuatorLimits,
               p: PhysicalParams, mode: str = MODE_FEEDFORWARD) -> "ControllerState":
        return cls(gamma=gamma_param(gains.epsilon, lim, p), mode=mode)


@dataclass(frozen=True)
class ControlOutput:
    u: Inputs        # post-saturation, what the plant receives
    u_unsat: Inputs  # pre-saturation, what the governor checks
    f_t: float
    theta_d: float
    beta_d: float


def sat(x: float, lam: float) -> float:
    """sign(x) * min(|x|, lam)."""
    if x > lam:
        return lam
    if x < -lam:
        return -lam
    return x


def pos_sat(x: float, lam: float) -> float:
    """max(sat(x, lam), 0); NaN maps to 0."""
    if x > lam:
        return lam
    if x > 0.0:
        return x
    return 0.0


def _safe_div(a: float, b: float) -> float:
    """IEEE-style division: finite/0 gives a signed infinity, 0/0 gives NaN."""
    if b != 0.0:
        return a / b
    if a == 0.0:
        return math.nan
    return math.copysign(math.inf, a) * math.copysign(1.0, b)


def ugv_control(s: SystemState, x_a: float, g: ControlGains) -> float:
    """Cart PD force command u_ff = k_px (x_a - x) - k_vx x_dot."""
    return g.k_px * (x_a - s.x) - g.k_vx * s.x_dot


def tangential_force(s: SystemState, alpha_a: float, g: ControlGains,
                     p: PhysicalParams, cs: ControllerState, dt: float) -> float:
    """Inclination PD with gravity compensation (plus optional clamped integral).

    Mutates ``cs.integral_alpha`` when the integral term is active.
    """
    err = alpha_a - s.alpha
    f_t = g.k_palpha * err - g.k_valpha * s.alpha_dot \
        + p.M_a * p.L * p.g * math.cos(s.alpha)
    if g.k_i > 0.0:
        cs.integral_alpha = sat(cs.integral_alpha + err * dt, g.i_sat)
        f_t += g.k_i * cs.integral_alpha
    return f_t


def gamma_param(epsilon: float, lim: ActuatorLimits, p: PhysicalParams) -> float:
    """Mapping gain pinning theta_d = pi/2 at f_t = T_max*L. Always > 1."""
    if not epsilon > 0.0:
        raise ValueError("epsilon must be strictly positive")
    return math.pi / (2.0 * math.atan(epsilon * lim.T_max * p.L))


def theta_map(f_t: float, gamma: float, epsilon: float) -> float:
    """Desired relative attitude: sat_{pi/2}(gamma * atan(epsilon * f_t))."""
    return sat(gamma * math.atan(epsilon * f_t), _PI_2)


def thrust_desired_angle(f_t: float, theta_d: float,
                         gamma: float, epsilon: float) -> float:
    """Normalized thrust u_n = f_t / sin(theta_d) (desired-angle law).

    Positive for every f_t: numerator and denominator are odd increasing
    functions of f_t. The f_t -> 0 limit is 1/(gamma*epsilon).
    """
    if f_t == 0.0:
        return 1.0 / (gamma * epsilon)
    return f_t / math.sin(theta_d)


def thrust_feedforward(f_t: float, theta: float, lim: ActuatorLimits,
                       p: PhysicalParams) -> float:
    """Normalized thrust possat_{T_max*L}(f_t / sin(theta)) (feedforward law).

    At sin(theta) = 0 the quotient is taken with IEEE semantics (signed
    infinity, or NaN for 0/0) and the positive saturation resolves it to
    T_max*L or 0; the trajectory meets that set with measure zero.
    """
    return pos_sat(_safe_div(f_t, math.sin(theta)), lim.T_max * p.L)


def attitude_control(s: SystemState, beta_d: float, g: ControlGains) -> float:
    """Inner-loop PD torque u2 = k_pbeta (beta_d - beta) - k_vbeta beta_dot.

    Stabilizing sign convention (attitude error taken as beta - beta_d in the
    closed-loop analysis); verified by the inner-loop convergence tests.
    """
    return g.k_pbeta * (beta_d - s.beta) - g.k_vbeta * s.beta_dot


def compute_control(s: SystemState, x_a: float, alpha_a: float,
                    g: ControlGains, p: PhysicalParams, lim: ActuatorLimits,
                    cs: ControllerState, dt: float) -> ControlOutput:
    """Full cascade: references in, saturated + raw actuator commands out.

    Pipeline: cart PD -> inclination PD (f_t) -> arctan mapping (theta_d,
    beta_d = alpha + theta_d) -> thrust law (mode from ``cs``) -> attitude PD
    -> allocation u3 = u_ff - u1 cos(beta) -> per-channel saturation.
    """
    u_ff = ugv_control(s, x_a, g)
    f_t = tangential_force(s, alpha_a, g, p, cs, dt)
    theta_d = theta_map(f_t, cs.gamma, g.epsilon)
    beta_d = s.alpha + theta_d
    if cs.mode == MODE_DESIRED_ANGLE:
        u_n = thrust_desired_angle(f_t, theta_d, cs.gamma, g.epsilon)
    else:
        u_n = thrust_feedforward(f_t, s.beta - s.alpha, lim, p)
    u1 = u_n / p.L
    u2 = attitude_control(s, beta_d, g)
    u3 = u_ff - u1 * math.cos(s.beta)
    unsat = Inputs(u1, u2, u3)
    clipped = Inputs(pos_sat(u1, lim.T_max),
                     sat(u2, lim.tau_max),
                     sat(u3, lim.F_max))
    return ControlOutput(u=clipped, u_unsat=unsat, f_t=f_t,
                         theta_d=theta_d, beta_d=beta_d)


def effective_attitude_error(theta_bar: float, theta_tilde: float, f_t: float,
                             lim: ActuatorLimits, p: PhysicalParams) -> float:
    """Attitude error equivalent to the feedforward thrust law's output.

    Under the feedforward law the force actually delivered at relative
    attitude theta = theta_bar + theta_tilde equals the force the
    desired-angle law would deliver at some modified error theta_f:

        f_t sin(theta_bar + theta_f) / sin(theta_bar)
            = possat_{T_max*L}(f_t / sin(theta)) * sin(theta)

    This returns the minimal-magnitude root theta_f. Within the regime the
    arctan mapping can actually reach (f_t <= T_max*L*sin(theta_bar)),
    |theta_f| <= |theta_tilde|: the feedforward acts as a gain of at most one
    on the attitude error.
    """
    if f_t == 0.0:
        return 0.0
    theta = theta_bar + theta_tilde
    f_new = thrust_feedforward(f_t, theta, lim, p) * math.sin(theta)
    s_target = f_new * math.sin(theta_bar) / f_t
    s_target = max(-1.0, min(1.0, s_target))
    base = math.asin(s_target)
    best = math.inf
    for root in (base, math.pi - base):
        for k in (-2.0 * math.pi, 0.0, 2.0 * math.pi):
            cand = root + k - theta_bar
            if abs(cand) < abs(best):
                best = cand
    return best
