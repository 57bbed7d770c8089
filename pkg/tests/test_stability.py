import dataclasses
import math

import numpy as np
import pytest

from aircart import stability as st
from aircart.dynamics import coriolis_matrix, mass_matrix

DELTA_CONST = 3.456994772367582      # 2/pi + 2 * M_a * L * g
KC = 0.14375                         # M_a * L
LAM_M = 1.11045968290674             # min inertia eigenvalue over the arc
LAM_MAX = 2.18750906709326           # max inertia eigenvalue over the arc


def test_delta_bound(params):
    assert st.delta_bound(0.0, params) == 0.0
    assert math.isclose(st.delta_bound(2.0, params), DELTA_CONST, rel_tol=1e-12)
    assert math.isclose(st.delta_bound(-0.5, params), 0.5 * DELTA_CONST,
                        rel_tol=1e-12)


def test_delta_bound_monte_carlo(params, lim_low):
    # The saturated-linear bound is a true statement only while the cot
    # factor's supremum 2*T_max*L/pi stays below the bound's 2/pi + slack;
    # that holds for the low-thrust configuration (T_max*L = 1.0625) and
    # provably fails for T_max*L = 6.25 as eps -> 0.
    rng = np.random.default_rng(17)
    for _ in range(20000):
        eps = float(np.exp(rng.uniform(math.log(0.01), math.log(100.0))))
        f_t = math.tan(rng.uniform(-math.pi / 2 + 1e-6, math.pi / 2 - 1e-6))
        alpha = rng.uniform(0.0, math.pi)
        tt = rng.uniform(-math.pi, math.pi)
        d = st.attitude_disturbance(f_t, alpha, tt, eps, params, lim_low)
        assert abs(d) <= st.delta_bound(tt, params) + 1e-12


def test_k_c_constant(params):
    assert math.isclose(st.k_c_constant(params), KC, rel_tol=1e-12)
    rng = np.random.default_rng(19)
    kc = st.k_c_constant(params)
    for _ in range(10000):
        a, ad = rng.uniform(0, math.pi), rng.uniform(-10, 10)
        xd = rng.uniform(-10, 10)
        qd = np.array([xd, ad])
        n = np.linalg.norm(coriolis_matrix(a, ad, params) @ qd)
        assert n <= kc * float(qd @ qd) + 1e-12
    assert np.linalg.norm(coriolis_matrix(1.0, 0.0, params) @ [5.0, 0.0]) == 0.0


def test_eigen_extremes(params):
    lm, lM = st.matrix_eigen_extremes(params)
    assert math.isclose(lm, LAM_M, rel_tol=1e-12)
    assert math.isclose(lM, LAM_MAX, rel_tol=1e-12)
    assert lm <= lM
    w = np.linalg.eigvalsh(mass_matrix(0.0, params))
    assert math.isclose(w[0], 1.13, rel_tol=1e-12)
    assert math.isclose(w[1], 2.16796875, rel_tol=1e-12)
    lm2, lM2 = st.matrix_eigen_extremes(params, grid=4000)
    assert abs(lm - lm2) < 1e-9 and abs(lM - lM2) < 1e-9


def test_gamma_p_max(params, gains):
    g0 = st.gamma_p_max(gains, params, 0.1)
    assert g0 > 0.0
    prev = 0.0
    for xi in (0.05, 0.1, 0.2, 0.4):
        cur = st.gamma_p_max(gains, params, xi)
        assert cur >= prev
        prev = cur
    with pytest.raises(ValueError):
        st.gamma_p_max(gains, params, 0.0)


def test_restriction_constants(params, gains):
    xi = 0.1
    gp = 0.5 * st.gamma_p_max(gains, params, xi)
    mu_max, q1, q2, th1, th2, rho = st.restriction_constants(gp, gains, params, xi)
    mu = 0.5 * mu_max
    # mu sits strictly inside all three defining inequalities
    _, lam_M = st.matrix_eigen_extremes(params)
    lam_m_kv = gains.k_valpha * math.sin(xi)
    kc = st.k_c_constant(params)
    assert 0.0 < mu < 0.5 * lam_m_kv - 2.0 * gp * lam_M - gp * kc
    assert mu < gp * gains.k_px - gp * gp * gains.k_vx / 2.0
    assert mu < gp * gains.k_palpha - gp * gp * gains.k_valpha / 2.0
    # radii follow their closed forms
    assert math.isclose(q1, 2 * gp * gains.k_px / (2 * mu + gp * gp * gains.k_vx) - 1,
                        rel_tol=1e-12)
    assert math.isclose(q2, 2 * gp * gains.k_palpha
                        / (2 * mu + gp * gp * gains.k_valpha) - 1, rel_tol=1e-12)
    assert q1 > 0.0 and q2 > 0.0 and rho > 0.0
    assert 0.0 < th1 <= math.pi / 2 - xi
    assert 0.0 < th2 <= math.pi / 2 - xi


def test_gamma_out(params, gains):
    xi = 0.1
    gp = 0.5 * st.gamma_p_max(gains, params, xi)
    mu_max, *_, rho = st.restriction_constants(gp, gains, params, xi)
    mu = 0.5 * mu_max
    g_out = st.gamma_out_gain(gains, params, gp, mu, rho)
    assert math.isfinite(g_out) and g_out > 0.0
    bigger_eps = dataclasses.replace(gains, epsilon=2 * gains.epsilon)
    assert st.gamma_out_gain(bigger_eps, params, gp, mu, rho) > g_out
    assert st.gamma_out_gain(gains, params, gp, mu, 2 * rho) > g_out


def test_gamma_in_floor_and_monotonicity(params, gains):
    est = st.estimate_gamma_in(gains, params)
    floor = gains.k_vbeta / gains.k_pbeta
    assert est >= floor - 1e-9
    prev = math.inf
    for lam in (1.0, 2.0, 5.0, 10.0, 100.0):
        g2 = dataclasses.replace(gains, k_pbeta=gains.k_pbeta * lam,
                                 k_vbeta=gains.k_vbeta * lam)
        cur = st.estimate_gamma_in(g2, params)
        assert cur <= prev + 1e-6
        prev = cur
    grow = math.nan
    prev = 0.0
    for mult in (1, 2, 8, 64, 512, 4096):
        p2 = dataclasses.replace(params, I_a=params.I_a * mult)
        grow = st.estimate_gamma_in(gains, p2)
        assert grow >= prev - 1e-9
        prev = grow
    assert grow > 1.0  # eventually underdamped, ringing above the floor


def test_gamma_in_against_ode_quadrature(params, gains):
    """Independent oracle: brute-force time-domain integration of |h| for a
    mildly underdamped configuration (large inertia keeps it non-stiff)."""
    p = dataclasses.replace(params, I_a=1.014)
    a1 = gains.k_vbeta / p.I_a
    a0 = gains.k_pbeta / p.I_a
    dt = 1e-5
    x1, x2 = 0.0, 1.0
    total = 0.0
    prev = abs(-a1 * x1 - x2)
    for _ in range(int(40.0 / dt)):
        def f(v1, v2):
            return v2, -a0 * v1 - a1 * v2
        k1 = f(x1, x2)
        k2 = f(x1 + 0.5 * dt * k1[0], x2 + 0.5 * dt * k1[1])
        k3 = f(x1 + 0.5 * dt * k2[0], x2 + 0.5 * dt * k2[1])
        k4 = f(x1 + dt * k3[0], x2 + dt * k3[1])
        x1 += dt * (k1[0] + 2 * (k2[0] + k3[0]) + k4[0]) / 6.0
        x2 += dt * (k1[1] + 2 * (k2[1] + k3[1]) + k4[1]) / 6.0
        cur = abs(-a1 * x1 - x2)
        total += 0.5 * (prev + cur) * dt
        prev = cur
    assert math.isclose(st.estimate_gamma_in(gains, p), total, rel_tol=1e-4)


def test_small_gain_verdict(params, gains):
    cert = st.compute_certificate(params, gains)
    fake = dataclasses.replace(cert, gamma_in_est=0.1, gamma_out=5.0)
    assert st.small_gain_verdict(fake)
    fake = dataclasses.replace(cert, gamma_in_est=1.0, gamma_out=1.0)
    assert not st.small_gain_verdict(fake)


def test_certificate_fields(params, gains):
    cert = st.compute_certificate(params, gains)
    for name in ("xi", "k_c", "b", "b_prime", "lambda_m_M", "lambda_M_M",
                 "lambda_m_Kv", "lambda_M_Kv", "lambda_M_Kp", "gamma_p", "mu",
                 "q_max_1", "q_max_2", "q_max", "theta_max_1", "theta_max_2",
                 "theta_max", "rho", "gamma_out", "gamma_in_est"):
        v = getattr(cert, name)
        assert math.isfinite(v) and v > 0.0, name
    assert cert.q_max == min(cert.q_max_1, cert.q_max_2)
    assert cert.theta_max == min(cert.theta_max_1, cert.theta_max_2)
    assert 0.0 < cert.theta_max <= math.pi / 2 - cert.xi
    assert cert.small_gain_ok == (cert.gamma_in_est * cert.gamma_out < 1.0)
    lines = st.report_lines(cert)
    assert len(lines) == 21
    assert lines[-1].startswith("small_gain_ok = ")


def test_diagonal_dominance(params, gains):
    cert = st.compute_certificate(params, gains)
    margins = st.diagonal_dominance_margins(cert, gains, params, n=20)
    assert all(m > 0.0 for m in margins)
