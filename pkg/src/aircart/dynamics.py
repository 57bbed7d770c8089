"""Planar rigid-rod dynamics for an aerial/ground vehicle team.

A birotor UAV is pinned to the tip of a rigid rod whose other end rides on
a driven cart. Generalized coordinates are the cart/rod-foot position ``x``,
the rod inclination ``alpha`` (0 = flat ahead, pi/2 = upright), and the UAV
attitude ``beta``. The cart sees force ``u3``, the UAV produces total thrust
``u1`` and pitch torque ``u2``.

The (x, alpha) subsystem is an open-chain manipulator

    M(q) qdd + C(q, qd) qd + g(q) = tau,      tau = [u3 + u1 cos(beta),
                                                     u1 L sin(beta - alpha)]

with the UAV attitude decoupled: I_a * bedd = u2. Linear viscous friction
(zeta_x, zeta_alpha, zeta_beta) is subtracted from each generalized force.

All functions are pure; nothing here mutates shared state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

__all__ = [
    "PhysicalParams",
    "SystemState",
    "Inputs",
    "ActuatorLimits",
    "BlowupError",
    "wrap_angle",
    "mass_matrix",
    "coriolis_matrix",
    "gravity_vector",
    "forward_dynamics",
    "total_energy",
    "step",
]


class BlowupError(RuntimeError):
    """Integration produced a non-finite state."""


@dataclass(frozen=True)
class PhysicalParams:
    """Masses, inertias, geometry and viscous-friction coefficients (SI).

    Derived aggregates (``M_t``, ``M_a``, ``I_0``) are recomputed on access so
    they can never go stale.
    """

    m_a: float      # UAV mass [kg]
    I_a: float      # UAV pitch inertia [kg m^2]
    m_s: float      # cart mass [kg]
    m_b: float      # rod mass [kg]
    I_b: float      # rod inertia about its foot [kg m^2]
    L: float        # rod length [m]
    d_G: float      # rod center of mass, measured from the cart [m]
    g: float = 9.81
    zeta_x: float = 0.0      # [N s/m]
    zeta_alpha: float = 0.0  # [N m s]
    zeta_beta: float = 0.0   # [N m s]

    def __post_init__(self):
        for name in ("m_a", "I_a", "m_s", "m_b", "I_b", "L", "d_G", "g"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be strictly positive")
        for name in ("zeta_x", "zeta_alpha", "zeta_beta"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be non-negative")
        if self.d_G > self.L:
            raise ValueError("d_G must not exceed L")

    @property
    def M_t(self) -> float:
        """Total translating mass."""
        return self.m_s + self.m_b + self.m_a

    @property
    def M_a(self) -> float:
        """Apparent mass seen at the rod tip."""
        return self.m_b * self.d_G / self.L + self.m_a

    @property
    def I_0(self) -> float:
        """System inertia about the rod foot, divided by L."""
        return (self.m_b * self.d_G * self.d_G + self.I_b) / self.L + self.m_a * self.L


@dataclass(frozen=True)
class SystemState:
    """Generalized coordinates and rates."""

    x: float = 0.0
    x_dot: float = 0.0
    alpha: float = 0.0
    alpha_dot: float = 0.0
    beta: float = 0.0
    beta_dot: float = 0.0

    def as_tuple(self):
        return (self.x, self.x_dot, self.alpha, self.alpha_dot,
                self.beta, self.beta_dot)

    def wrapped(self) -> "SystemState":
        """Copy with beta wrapped to [-pi, pi) for logging/readout."""
        return replace(self, beta=wrap_angle(self.beta))


@dataclass(frozen=True)
class Inputs:
    """Actuator commands: thrust [N], UAV torque [N m], cart force [N]."""

    u1: float = 0.0
    u2: float = 0.0
    u3: float = 0.0


@dataclass(frozen=True)
class ActuatorLimits:
    T_max: float    # thrust ceiling [N]
    tau_max: float  # |torque| ceiling [N m]
    F_max: float    # |cart force| ceiling [N]

    def __post_init__(self):
        if not (self.T_max > 0.0 and self.tau_max > 0.0 and self.F_max > 0.0):
            raise ValueError("actuator limits must be strictly positive")
        if not self.F_max > self.T_max:
            raise ValueError("F_max must exceed T_max")


def wrap_angle(a: float) -> float:
    """Wrap an angle to [-pi, pi)."""
    w = math.fmod(a + math.pi, 2.0 * math.pi)
    if w < 0.0:
        w += 2.0 * math.pi
    return w - math.pi


def mass_matrix(alpha: float, p: PhysicalParams) -> np.ndarray:
    """Inertia matrix of the (x, alpha) subsystem. Symmetric positive definite."""
    m12 = -p.M_a * p.L * math.sin(alpha)
    return np.array([[p.M_t, m12], [m12, p.I_0 * p.L]])


def coriolis_matrix(alpha: float, alpha_dot: float, p: PhysicalParams) -> np.ndarray:
    return np.array([[0.0, -p.M_a * p.L * alpha_dot * math.cos(alpha)],
                     [0.0, 0.0]])


def gravity_vector(alpha: float, p: PhysicalParams) -> np.ndarray:
    return np.array([0.0, p.M_a * p.L * p.g * math.cos(alpha)])


def _accelerations(x_dot: float, alpha: float, alpha_dot: float,
                   beta: float, beta_dot: float,
                   u1: float, u2: float, u3: float,
                   p: PhysicalParams):
    """Scalar core of the forward dynamics: (xdd, alphadd, betadd).

    Solves the 2x2 system directly; det = M_t*I_0*L - (M_a L sin a)^2 > 0
    for any valid parameter set (Cauchy-Schwarz on the inertia couplings).
    """
    mal = p.M_a * p.L
    sa = math.sin(alpha)
    ca = math.cos(alpha)
    tau1 = u3 + u1 * math.cos(beta)
    tau2 = u1 * p.L * math.sin(beta - alpha)
    # rhs = tau - C qd - g - friction
    r1 = tau1 + mal * alpha_dot * alpha_dot * ca - p.zeta_x * x_dot
    r2 = tau2 - mal * p.g * ca - p.zeta_alpha * alpha_dot
    m11 = p.M_t
    m12 = -mal * sa
    m22 = p.I_0 * p.L
    det = m11 * m22 - m12 * m12
    if not det > 0.0:
        raise ArithmeticError("singular mass matrix: invalid parameters")
    xdd = (m22 * r1 - m12 * r2) / det
    alphadd = (m11 * r2 - m12 * r1) / det
    betadd = (u2 - p.zeta_beta * beta_dot) / p.I_a
    return xdd, alphadd, betadd


def forward_dynamics(s: SystemState, u: Inputs, p: PhysicalParams):
    """Time derivative of the state under already-saturated inputs.

    Returns (x_dot, x_ddot, alpha_dot, alpha_ddot, beta_dot, beta_ddot).
    """
    xdd, aldd, bedd = _accelerations(s.x_dot, s.alpha, s.alpha_dot,
                                     s.beta, s.beta_dot, u.u1, u.u2, u.u3, p)
    return (s.x_dot, xdd, s.alpha_dot, aldd, s.beta_dot, bedd)


def total_energy(s: SystemState, p: PhysicalParams) -> float:
    """Kinetic plus gravitational potential energy (potential zero at alpha=0)."""
    mal = p.M_a * p.L
    m12 = -mal * math.sin(s.alpha)
    kin = 0.5 * (p.M_t * s.x_dot * s.x_dot
                 + 2.0 * m12 * s.x_dot * s.alpha_dot
                 + p.I_0 * p.L * s.alpha_dot * s.alpha_dot) \
        + 0.5 * p.I_a * s.beta_dot * s.beta_dot
    pot = mal * p.g * math.sin(s.alpha)
    return kin + pot


def step(s: SystemState, u: Inputs, p: PhysicalParams, dt: float) -> SystemState:
    """One classical RK4 step with the inputs held constant (zero-order hold)."""
    if dt < 0.0:
        raise ValueError("dt must be non-negative")
    x, xd, al, ald, be, bed = s.as_tuple()
    u1, u2, u3 = u.u1, u.u2, u.u3
    h2 = 0.5 * dt

    try:
        return _rk4(x, xd, al, ald, be, bed, u1, u2, u3, p, dt, h2)
    except (ValueError, OverflowError) as exc:
        # math.sin/cos raise on non-finite arguments
        raise BlowupError("non-finite state during integration step") from exc


def _rk4(x, xd, al, ald, be, bed, u1, u2, u3, p, dt, h2):
    k1x, k1a, k1b = _accelerations(xd, al, ald, be, bed, u1, u2, u3, p)
    xd2 = xd + h2 * k1x
    ald2 = ald + h2 * k1a
    bed2 = bed + h2 * k1b
    k2x, k2a, k2b = _accelerations(xd2, al + h2 * ald, ald2,
                                   be + h2 * bed, bed2, u1, u2, u3, p)
    xd3 = xd + h2 * k2x
    ald3 = ald + h2 * k2a
    bed3 = bed + h2 * k2b
    k3x, k3a, k3b = _accelerations(xd3, al + h2 * ald2, ald3,
                                   be + h2 * bed2, bed3, u1, u2, u3, p)
    xd4 = xd + dt * k3x
    ald4 = ald + dt * k3a
    bed4 = bed + dt * k3b
    k4x, k4a, k4b = _accelerations(xd4, al + dt * ald3, ald4,
                                   be + dt * bed3, bed4, u1, u2, u3, p)

    out = SystemState(
        x=x + dt * (xd + 2.0 * (xd2 + xd3) + xd4) / 6.0,
        x_dot=xd + dt * (k1x + 2.0 * (k2x + k3x) + k4x) / 6.0,
        alpha=al + dt * (ald + 2.0 * (ald2 + ald3) + ald4) / 6.0,
        alpha_dot=ald + dt * (k1a + 2.0 * (k2a + k3a) + k4a) / 6.0,
        beta=be + dt * (bed + 2.0 * (bed2 + bed3) + bed4) / 6.0,
        beta_dot=bed + dt * (k1b + 2.0 * (k2b + k3b) + k4b) / 6.0,
    )
    if not all(map(math.isfinite, out.as_tuple())):
        raise BlowupError("non-finite state after integration step")
    return out
