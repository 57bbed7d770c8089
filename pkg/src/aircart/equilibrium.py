"""Attainable equilibria of the rod under actuator saturation.

At rest the inputs must balance gravity's moment on the rod:

    u3 = -u1 cos(beta),   u1 sin(beta - alpha) = M_a g cos(alpha),   u2 = 0.

Since sin(.) is at most one, a thrust ceiling T_max below M_a*g restricts the
steady inclinations to an arc around the upright position. The cart position
never appears: any x is an equilibrium.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .controller import ControlGains, gamma_param, theta_map
from .dynamics import ActuatorLimits, Inputs, PhysicalParams

__all__ = [
    "AlphaRange",
    "BetaRange",
    "attainable_alpha_range",
    "attainable_beta_range",
    "steady_state_inputs",
    "desired_beta",
]

_ZERO_TOL = 1e-12


@dataclass(frozen=True)
class AlphaRange:
    alpha_min: float
    alpha_max: float

    def contains(self, alpha: float, open_interval: bool = False) -> bool:
        if open_interval:
            return self.alpha_min < alpha < self.alpha_max
        return self.alpha_min <= alpha <= self.alpha_max


@dataclass(frozen=True)
class BetaRange:
    beta_min: float
    beta_max: float


def attainable_alpha_range(p: PhysicalParams, lim: ActuatorLimits) -> AlphaRange:
    """Steady inclinations reachable with thrust in [0, T_max].

    The full [0, pi] when T_max >= M_a*g, otherwise the arc
    [acos(T_max/(M_a g)), acos(-T_max/(M_a g))].
    """
    r = lim.T_max / (p.M_a * p.g)
    if r >= 1.0:
        return AlphaRange(0.0, math.pi)
    return AlphaRange(math.acos(r), math.acos(-r))


def attainable_beta_range(alpha_bar: float, p: PhysicalParams,
                          lim: ActuatorLimits) -> BetaRange:
    """Steady-attitude interval for a given steady inclination.

    Endpoints are where the balance requires |u1| = T_max exactly:
    beta_min = asin(arg) + alpha_bar, beta_max = pi - asin(arg) + alpha_bar
    with arg = +M_a g cos(alpha)/T_max for alpha below pi/2 and the negated
    argument from pi/2 up (so the asin argument is non-negative either way).
    For alpha above pi/2 the interval satisfies the balance with a negative
    u1; the positive-thrust equilibria live on its sin-mirrored image, which
    is where `desired_beta` points.
    """
    rng = attainable_alpha_range(p, lim)
    if not rng.contains(alpha_bar):
        raise ValueError(f"alpha_bar={alpha_bar!r} outside attainable range "
                         f"[{rng.alpha_min}, {rng.alpha_max}]")
    arg = p.M_a * p.g * math.cos(alpha_bar) / lim.T_max
    if alpha_bar >= math.pi / 2.0:
        arg = -arg
    arg = min(1.0, max(-1.0, arg))  # guard float overshoot at the arc ends
    a = math.asin(arg)
    return BetaRange(a + alpha_bar, math.pi - a + alpha_bar)


def steady_state_inputs(alpha_bar: float, beta_bar: float,
                        p: PhysicalParams) -> Inputs:
    """Inputs holding (alpha_bar, beta_bar) at rest; u2 is always zero.

    The degenerate pair cos(alpha) = 0 with beta = alpha admits any thrust
    and resolves to the energy-minimal u1 = 0. A pair with sin(beta - alpha)
    = 0 but a nonzero gravity moment has no equilibrium and raises.
    No saturation is applied; u1 may exceed T_max or come out negative for
    mirror-arc attitudes.
    """
    s = math.sin(beta_bar - alpha_bar)
    c = p.M_a * p.g * math.cos(alpha_bar)
    if abs(s) <= _ZERO_TOL:
        if abs(c) <= _ZERO_TOL:
            u1 = 0.0
        else:
            raise ValueError("no equilibrium: sin(beta-alpha)=0 with a "
                             "nonzero gravity moment")
    else:
        u1 = c / s
    return Inputs(u1=u1, u2=0.0, u3=-u1 * math.cos(beta_bar))


def desired_beta(alpha_d: float, g: ControlGains, p: PhysicalParams,
                 lim: ActuatorLimits) -> float:
    """Steady UAV attitude the arctan mapping assigns to a desired inclination.

    beta_d = alpha_d + sat_{pi/2}(gamma * atan(epsilon * M_a L g cos(alpha_d)));
    alpha_d must lie strictly inside the attainable range.
    """
    rng = attainable_alpha_range(p, lim)
    if not rng.contains(alpha_d, open_interval=True):
        raise ValueError(f"alpha_d={alpha_d!r} outside the open attainable "
                         f"interval ({rng.alpha_min}, {rng.alpha_max})")
    gamma = gamma_param(g.epsilon, lim, p)
    f_t = p.M_a * p.L * p.g * math.cos(alpha_d)
    return alpha_d + theta_map(f_t, gamma, g.epsilon)
