"""Numerically evaluated stability certificate for the cascade loop.

The closed loop splits into an inner attitude loop (linear, disturbed by the
desired-attitude rate) and an outer manipulator loop (disturbed by the
attitude error through a bounded coupling term). Each piece admits an
asymptotic gain; the interconnection is certified stable when the loop gain
product is below one.

Everything here is computed, not proven: eigenvalue extremes come from a
grid, the inner gain from the exact L1 norm of the impulse response, and the
restriction radii/diagonal-dominance conditions from their defining
inequalities. The Monte-Carlo validation of the coupling bound lives in the
test suite.

Notation used throughout (mirrors the controller gains):

* ``k_c``        -- Coriolis quadratic bound, ||C(q, qd) qd|| <= k_c ||qd||^2.
* ``b, b_prime`` -- quadratic lower bounds of the proportional energy term.
* ``gamma_p``    -- cross-term weight of the strict Lyapunov function.
* ``mu``         -- guaranteed quadratic decay rate inside the restrictions.
* ``q_max``, ``theta_max`` -- restriction radii on ||(x_err, alpha_err)||
  and on the attitude error within which the decay holds.
* ``rho``        -- ISS ball radius per unit attitude error.
* ``gamma_out`` / ``gamma_in_est`` -- outer/inner asymptotic gains.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .controller import ControlGains, gamma_param, theta_map
from .dynamics import ActuatorLimits, PhysicalParams

__all__ = [
    "StabilityCertificate",
    "delta_bound",
    "attitude_disturbance",
    "k_c_constant",
    "matrix_eigen_extremes",
    "gamma_p_max",
    "restriction_constants",
    "gamma_out_gain",
    "estimate_gamma_in",
    "small_gain_verdict",
    "compute_certificate",
    "diagonal_dominance_margins",
    "report_lines",
]


@dataclass(frozen=True)
class StabilityCertificate:
    xi: float
    k_c: float
    b: float
    b_prime: float
    lambda_m_M: float
    lambda_M_M: float
    lambda_m_Kv: float
    lambda_M_Kv: float
    lambda_M_Kp: float
    gamma_p: float
    mu: float
    q_max_1: float
    q_max_2: float
    q_max: float
    theta_max_1: float
    theta_max_2: float
    theta_max: float
    rho: float
    gamma_out: float
    gamma_in_est: float
    small_gain_ok: bool


def delta_bound(theta_tilde: float, p: PhysicalParams) -> float:
    """Saturated-linear bound on the attitude-coupling disturbance norm.

    (2/pi + 2 M_a L g) * min(|theta_tilde|, 1): the linear branch applies for
    |theta_tilde| <= 1, the constant branch beyond.
    """
    c = 2.0 / math.pi + 2.0 * p.M_a * p.L * p.g
    a = abs(theta_tilde)
    return c * a if a <= 1.0 else c


def attitude_disturbance(f_t: float, alpha: float, theta_tilde: float,
                         epsilon: float, p: PhysicalParams,
                         lim: ActuatorLimits) -> float:
    """Torque disturbance injected by an attitude error theta_tilde.

        delta = f_t cot(theta_d) sin(theta_tilde)
                - 2 M_a L g cos(alpha) sin^2(theta_tilde / 2)

    with theta_d from the arctan mapping of f_t. The cotangent factor is
    taken as exactly zero once the mapping saturates (theta_d = +-pi/2) and
    as its removable limit 1/(gamma*epsilon) at f_t = 0.
    """
    gamma = gamma_param(epsilon, lim, p)
    raw = gamma * math.atan(epsilon * f_t)
    if f_t == 0.0:
        cot_term = math.sin(theta_tilde) / (gamma * epsilon)
    elif abs(raw) >= math.pi / 2.0:
        cot_term = 0.0
    else:
        theta_d = theta_map(f_t, gamma, epsilon)
        cot_term = f_t * (math.cos(theta_d) / math.sin(theta_d)) \
            * math.sin(theta_tilde)
    s_half = math.sin(0.5 * theta_tilde)
    return cot_term - 2.0 * p.M_a * p.L * p.g * math.cos(alpha) * s_half * s_half


def k_c_constant(p: PhysicalParams) -> float:
    """Coriolis bound: ||C qd|| = M_a L |ad|^2 |cos a| <= M_a L ||qd||^2."""
    return p.M_a * p.L


def matrix_eigen_extremes(p: PhysicalParams, grid: int = 2000):
    """(smallest, largest) inertia-matrix eigenvalue over the inclination range.

    Evaluated on ``grid`` subintervals of [0, pi] (endpoints and midpoint
    included, where the extremes actually sit), then re-checked on a doubled
    grid; disagreement beyond 1e-9 raises.
    """
    def extremes(n):
        sa = np.sin(np.linspace(0.0, math.pi, n + 1))
        off = p.M_a * p.L * sa
        center = 0.5 * (p.M_t + p.I_0 * p.L)
        radius = np.hypot(0.5 * (p.M_t - p.I_0 * p.L), off)
        return float(np.min(center - radius)), float(np.max(center + radius))

    lm, lM = extremes(grid)
    lm2, lM2 = extremes(2 * grid)
    if max(abs(lm - lm2), abs(lM - lM2)) > 1e-9:
        raise RuntimeError("eigenvalue grid did not converge")
    return lm2, lM2


def gamma_p_max(g: ControlGains, p: PhysicalParams, xi: float) -> float:
    """Supremum of the admissible Lyapunov cross-term weight.

    min of sqrt(2b / lam_M{M}), 2 b' / lam_M{Kv}, and
    lam_m{Kv} / (2 (k_c + 2 lam_M{M})), with b = k_palpha/2,
    b' = k_palpha sin(xi), lam_m{Kv} = k_valpha sin(xi), lam_M{Kv} = k_vx.
    """
    if not 0.0 < xi < math.pi / 2.0:
        raise ValueError("xi must lie in (0, pi/2)")
    _, lam_M = matrix_eigen_extremes(p)
    b = 0.5 * g.k_palpha
    b_prime = g.k_palpha * math.sin(xi)
    lam_m_kv = g.k_valpha * math.sin(xi)
    return min(math.sqrt(2.0 * b / lam_M),
               2.0 * b_prime / g.k_vx,
               lam_m_kv / (2.0 * (k_c_constant(p) + 2.0 * lam_M)))


def restriction_constants(gamma_p: float, g: ControlGains, p: PhysicalParams,
                          xi: float):
    """Decay rate bound and restriction radii for a given gamma_p.

    Returns (mu_max, q_max_1, q_max_2, theta_max_1, theta_max_2, rho), with
    mu fixed at mu_max/2 inside. The q radii follow their defining formulas;
    theta_max_1 is the exact diagonal-dominance angle evaluated at the
    certified q radius (the worst-cased textbook expression degenerates to
    exactly zero there), and theta_max_2 reports pi/2 - xi when its arccos
    argument leaves [-1, 1] (no additional restriction).
    """
    _, lam_M = matrix_eigen_extremes(p)
    lam_m_kv = g.k_valpha * math.sin(xi)
    k_c = k_c_constant(p)
    cap = math.pi / 2.0 - xi

    mu_max = min(0.5 * lam_m_kv - 2.0 * gamma_p * lam_M - gamma_p * k_c,
                 gamma_p * g.k_px - gamma_p * gamma_p * g.k_vx / 2.0,
                 gamma_p * g.k_palpha - gamma_p * gamma_p * g.k_valpha / 2.0)
    if not mu_max > 0.0:
        raise ValueError("gamma_p too large: no admissible decay rate")
    mu = 0.5 * mu_max

    q_max_1 = 2.0 * gamma_p * g.k_px / (2.0 * mu + gamma_p * gamma_p * g.k_vx) - 1.0
    q_max_2 = 2.0 * gamma_p * g.k_palpha \
        / (2.0 * mu + gamma_p * gamma_p * g.k_valpha) - 1.0
    q_cert = min(q_max_1, q_max_2)

    # exact p22 dominance at ||q_err|| = q_cert:
    # cos(theta) * (k_palpha + B) > mu + k_palpha
    d = 1.0 + q_cert
    bracket = gamma_p * g.k_palpha / d \
        - gamma_p * gamma_p * g.k_valpha / (2.0 * d * d)
    arg1 = (g.k_palpha + mu) / (g.k_palpha + bracket)
    theta_max_1 = cap if not -1.0 <= arg1 <= 1.0 else min(math.acos(arg1), cap)

    arg2 = (-0.5 * lam_m_kv + 2.0 * gamma_p * lam_M + gamma_p * k_c
            + mu + g.k_palpha) / g.k_palpha
    theta_max_2 = cap if not -1.0 <= arg2 <= 1.0 else min(math.acos(arg2), cap)

    rho = gamma_p * math.sqrt(1.0 + mu * mu) \
        * (2.0 / math.pi + 2.0 * p.M_a * p.L * p.g) / mu
    return mu_max, q_max_1, q_max_2, theta_max_1, theta_max_2, rho


def gamma_out_gain(g: ControlGains, p: PhysicalParams, gamma_p: float,
                   mu: float, rho: float) -> float:
    """Asymptotic gain of the outer loop, attitude error -> attitude-rate demand.

    (lam_qd + lam_qe) * rho + lam_delta * (2/pi + 2 M_a L g), where the lam
    coefficients bound the desired-attitude rate in terms of the state norm.
    """
    lam_m, _ = matrix_eigen_extremes(p)
    malg = p.M_a * p.L * p.g
    lam_qd = g.epsilon * (g.k_palpha + malg) + 1.0 \
        + g.epsilon * g.k_valpha * (k_c_constant(p) + g.k_vx) / lam_m
    lam_qe = g.epsilon * g.k_valpha * g.k_px / lam_m
    lam_delta = g.epsilon * g.k_valpha / lam_m
    return (lam_qd + lam_qe) * rho + lam_delta * (2.0 / math.pi + 2.0 * malg)


def estimate_gamma_in(g: ControlGains, p: PhysicalParams) -> float:
    """Peak-to-peak (L-infinity induced) gain of the inner attitude loop.

    The loop from the desired-attitude rate to the attitude error is linear:

        G(s) = -(I_a s + k_vbeta) / (I_a s^2 + k_vbeta s + k_pbeta)

    and its induced gain equals the L1 norm of the impulse response. The
    response is a two-mode exponential, so the norm is integrated exactly,
    segment by segment between sign changes with a closed-form geometric
    tail. Never below the ramp-tracking floor k_vbeta/k_pbeta = |G(0)|.
    """
    if not (g.k_pbeta > 0.0 and g.k_vbeta > 0.0):
        raise ValueError("inner-loop gains must be strictly positive")
    a1 = g.k_vbeta / p.I_a
    a0 = g.k_pbeta / p.I_a
    disc = a1 * a1 - 4.0 * a0
    if disc >= 0.0:
        # overdamped (or critically damped): h = A e^{s1 t} + B e^{s2 t} with
        # at most one sign change, and none for t > 0 here, so the L1 norm
        # collapses to |integral of h| = |G(0)|. Kept general regardless.
        rt = math.sqrt(disc)
        s1 = 0.5 * (-a1 + rt)
        s2 = 0.5 * (-a1 - rt)
        if s1 == s2:
            return a1 / a0
        A = -(s1 + a1) / (s1 - s2)
        B = -(s2 + a1) / (s2 - s1)

        def H(t):
            return A / s1 * math.exp(s1 * t) + B / s2 * math.exp(s2 * t)

        total = abs(H(0.0))
        if A != 0.0 and -B / A > 0.0:
            t_cross = math.log(-B / A) / (s1 - s2)
            if t_cross > 0.0:
                total = abs(H(t_cross) - H(0.0)) + abs(H(t_cross))
        return total

    # underdamped: h = -R e^{sigma t} cos(omega t - phi)
    sigma = -0.5 * a1
    omega = 0.5 * math.sqrt(-disc)
    c = (sigma + a1) / omega
    big_r = math.sqrt(1.0 + c * c)
    phi = math.atan(c)
    t0 = (phi + math.pi / 2.0) / omega
    h0 = -big_r * math.exp(sigma * t0) * omega / a0   # primitive at first zero
    head = abs(h0 - a1 / a0)
    ratio = math.exp(sigma * math.pi / omega)
    tail = big_r * omega / a0 * (1.0 + ratio) * math.exp(sigma * t0) \
        / (1.0 - ratio)
    return head + tail


def small_gain_verdict(cert: StabilityCertificate) -> bool:
    """True when the loop gain product is strictly below one."""
    return cert.gamma_in_est * cert.gamma_out < 1.0


def compute_certificate(p: PhysicalParams, g: ControlGains,
                        xi: float = 0.1) -> StabilityCertificate:
    """Evaluate every certificate constant for one parameter/gain set.

    gamma_p and mu sit at half their admissible suprema (midpoint choice:
    any interior value is valid, the midpoint is robust to rounding).
    """
    lam_m, lam_M = matrix_eigen_extremes(p)
    gp_max = gamma_p_max(g, p, xi)
    gamma_p = 0.5 * gp_max
    mu_max, q1, q2, th1, th2, rho = restriction_constants(gamma_p, g, p, xi)
    mu = 0.5 * mu_max
    g_out = gamma_out_gain(g, p, gamma_p, mu, rho)
    g_in = estimate_gamma_in(g, p)
    cert = StabilityCertificate(
        xi=xi,
        k_c=k_c_constant(p),
        b=0.5 * g.k_palpha,
        b_prime=g.k_palpha * math.sin(xi),
        lambda_m_M=lam_m,
        lambda_M_M=lam_M,
        lambda_m_Kv=g.k_valpha * math.sin(xi),
        lambda_M_Kv=g.k_vx,
        lambda_M_Kp=g.k_px,
        gamma_p=gamma_p,
        mu=mu,
        q_max_1=q1,
        q_max_2=q2,
        q_max=min(q1, q2),
        theta_max_1=th1,
        theta_max_2=th2,
        theta_max=min(th1, th2),
        rho=rho,
        gamma_out=g_out,
        gamma_in_est=g_in,
        small_gain_ok=g_in * g_out < 1.0,
    )
    return cert


def diagonal_dominance_margins(cert: StabilityCertificate, g: ControlGains,
                               p: PhysicalParams, n: int = 20):
    """Margins of the four dominance conditions over the certified open box.

    Grid: n x n positions (x_err, alpha_err) spanning ||q_err|| up to q_max,
    times n attitude errors up to theta_max (shrunk by 1e-6: the certificate
    is a strict statement on the open box and theta_max_1 is tight by
    construction). Returns (min p11', min (p22' - p24), min p33',
    min (p44' - p42)); all four must be positive.
    """
    _, lam_M = matrix_eigen_extremes(p)
    lam_m_kv = g.k_valpha * math.sin(cert.xi)
    side = np.linspace(-cert.q_max / math.sqrt(2.0), cert.q_max / math.sqrt(2.0), n)
    xe, ae = np.meshgrid(side, side)
    r = np.hypot(xe, ae).ravel()
    th = np.linspace(-cert.theta_max, cert.theta_max, n) * (1.0 - 1e-6)
    rr, tt = np.meshgrid(r, th)
    d = 1.0 + rr
    ct = np.cos(tt)
    gp, mu = cert.gamma_p, cert.mu
    p11 = gp * g.k_px / d - gp * gp * g.k_vx / (2.0 * d * d) - mu
    p22 = gp * g.k_palpha * ct / d - gp * gp * g.k_valpha * ct / (2.0 * d * d) - mu
    p24 = g.k_palpha * (1.0 - ct)
    p33 = 0.5 * lam_m_kv - 2.0 * gp * lam_M - gp * cert.k_c - mu
    return (float(np.min(p11)), float(np.min(p22 - p24)),
            p33, float(np.min(p33 - p24)))


def report_lines(cert: StabilityCertificate):
    """Flat key-value rendering, one constant per line."""
    lines = []
    for name in ("xi", "k_c", "b", "b_prime", "lambda_m_M", "lambda_M_M",
                 "lambda_m_Kv", "lambda_M_Kv", "lambda_M_Kp", "gamma_p", "mu",
                 "q_max_1", "q_max_2", "q_max", "theta_max_1", "theta_max_2",
                 "theta_max", "rho", "gamma_out", "gamma_in_est"):
        lines.append(f"{name} = {getattr(cert, name):.12g}")
    lines.append(f"small_gain_ok = {'true' if cert.small_gain_ok else 'false'}")
    return lines
