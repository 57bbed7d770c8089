import math

import numpy as np
import pytest

from aircart.controller import (MODE_DESIRED_ANGLE, MODE_FEEDFORWARD,
                                ControlGains, ControllerState, attitude_control,
                                compute_control, effective_attitude_error,
                                gamma_param, pos_sat, sat, tangential_force,
                                theta_map, thrust_desired_angle,
                                thrust_feedforward, ugv_control)
from aircart.dynamics import SystemState
from aircart.equilibrium import (attainable_alpha_range, desired_beta,
                                 steady_state_inputs)

GAMMA_REF = 1.0442540336714727       # pi / (2 atan(2.4 * 5 * 1.25))
UN_AT_ZERO = 0.3990089128042114      # 1 / (gamma * eps)


def test_sat():
    assert sat(0.5, 1.0) == 0.5
    assert sat(-3.0, 1.0) == -1.0
    assert sat(2.0, 2.0) == 2.0


def test_pos_sat():
    assert pos_sat(-1.0, 2.0) == 0.0
    assert pos_sat(1.0, 2.0) == 1.0
    assert pos_sat(5.0, 2.0) == 2.0
    assert pos_sat(math.nan, 2.0) == 0.0
    assert pos_sat(math.inf, 2.0) == 2.0
    assert pos_sat(-math.inf, 2.0) == 0.0


def test_gains_validation_and_ordering_warning():
    with pytest.raises(ValueError):
        ControlGains(k_px=0.0, k_vx=8.5, k_palpha=1.0, k_valpha=1.5,
                     k_pbeta=3.0, k_vbeta=2.85, epsilon=2.4)
    with pytest.warns(UserWarning):
        ControlGains(k_px=0.5, k_vx=8.5, k_palpha=1.0, k_valpha=1.5,
                     k_pbeta=3.0, k_vbeta=2.85, epsilon=2.4)


def test_ugv_control(gains):
    assert ugv_control(SystemState(x=0.5), 0.5, gains) == 0.0
    assert math.isclose(ugv_control(SystemState(), 0.5, gains), 10.0,
                        rel_tol=1e-12)
    up = ugv_control(SystemState(x=-0.1), 0.0, gains)
    dn = ugv_control(SystemState(x=0.1), 0.0, gains)
    assert up == -dn and up > 0.0


def test_tangential_force(params, gains, lim_high):
    cs = ControllerState.create(gains, lim_high, params)
    s = SystemState(alpha=math.pi / 2)
    assert abs(tangential_force(s, math.pi / 2, gains, params, cs, 1e-3)) < 1e-12
    f = tangential_force(s, 3 * math.pi / 4, gains, params, cs, 1e-3)
    assert math.isclose(f, math.pi / 4, rel_tol=1e-9)
    # gravity compensation alone at zero error / rate
    s2 = SystemState(alpha=0.7)
    f2 = tangential_force(s2, 0.7, gains, params, cs, 1e-3)
    assert math.isclose(f2, params.M_a * params.L * params.g * math.cos(0.7),
                        rel_tol=1e-12)


def test_integral_term_accumulates_and_clamps(params, lim_high):
    g = ControlGains(k_px=20.0, k_vx=8.5, k_palpha=1.0, k_valpha=1.5,
                     k_pbeta=3.0, k_vbeta=2.85, epsilon=2.4,
                     k_i=0.5, i_sat=0.02)
    cs = ControllerState.create(g, lim_high, params)
    s = SystemState(alpha=math.pi / 2)
    tangential_force(s, math.pi / 2 + 1.0, g, params, cs, 0.01)
    assert math.isclose(cs.integral_alpha, 0.01, rel_tol=1e-12)
    for _ in range(10):
        tangential_force(s, math.pi / 2 + 1.0, g, params, cs, 0.01)
    assert cs.integral_alpha == 0.02  # clamped
    before = cs.integral_alpha
    tangential_force(s, math.pi / 2 + 1.0, g, params, cs, 0.0)
    assert cs.integral_alpha == before  # dt = 0 leaves it untouched


def test_gamma_param(params, lim_high):
    g = gamma_param(2.4, lim_high, params)
    assert math.isclose(g, GAMMA_REF, rel_tol=1e-12)
    assert gamma_param(1e7, lim_high, params) < 1.0 + 1e-6
    for eps in (0.01, 0.3, 2.4, 50.0):
        assert gamma_param(eps, lim_high, params) > 1.0


def test_theta_map(params, lim_high):
    tl = lim_high.T_max * params.L
    assert abs(theta_map(tl, GAMMA_REF, 2.4) - math.pi / 2) < 1e-12
    assert theta_map(0.0, GAMMA_REF, 2.4) == 0.0
    assert abs(theta_map(-tl, GAMMA_REF, 2.4) + math.pi / 2) < 1e-12
    rng = np.random.default_rng(1)
    for f in rng.uniform(-10, 10, 200):
        assert theta_map(-f, GAMMA_REF, 2.4) == -theta_map(f, GAMMA_REF, 2.4)


def test_thrust_desired_angle(params, lim_high):
    assert math.isclose(thrust_desired_angle(0.0, 0.0, GAMMA_REF, 2.4),
                        UN_AT_ZERO, rel_tol=1e-12)
    for f in (1e-6, -1e-6):
        th = theta_map(f, GAMMA_REF, 2.4)
        un = thrust_desired_angle(f, th, GAMMA_REF, 2.4)
        assert abs(un - UN_AT_ZERO) < 1e-5
    rng = np.random.default_rng(2)
    for u in rng.uniform(-1.5, 1.5, 1000):
        f = math.tan(u)
        un = thrust_desired_angle(f, theta_map(f, GAMMA_REF, 2.4),
                                  GAMMA_REF, 2.4)
        assert un > 0.0


def test_thrust_feedforward(params, lim_high):
    tl = lim_high.T_max * params.L
    assert math.isclose(thrust_feedforward(1.0, math.pi / 4, lim_high, params),
                        1.0 / math.sin(math.pi / 4), rel_tol=1e-12)
    assert thrust_feedforward(-1.0, math.pi / 4, lim_high, params) == 0.0
    assert thrust_feedforward(100.0, math.pi / 2, lim_high, params) == tl
    # exact zero denominator: signed-infinity / NaN semantics
    assert thrust_feedforward(1.0, 0.0, lim_high, params) == tl
    assert thrust_feedforward(-1.0, 0.0, lim_high, params) == 0.0
    assert thrust_feedforward(0.0, 0.0, lim_high, params) == 0.0


def test_attitude_control(gains):
    assert attitude_control(SystemState(beta=1.0), 1.0, gains) == 0.0
    u2 = attitude_control(SystemState(beta=math.pi / 2), math.pi / 2 + 0.1, gains)
    assert math.isclose(u2, 0.3, rel_tol=1e-9)


def test_inner_loop_converges(params, gains):
    # unsaturated linear attitude loop: the chosen sign convention must be
    # stabilizing from rest for any positive gains
    beta_d = 1.3
    be, bed = 0.0, 0.0
    dt = 1e-4
    for _ in range(200000):  # 20 s
        u2 = attitude_control(SystemState(beta=be, beta_dot=bed), beta_d, gains)
        # exact linear plant, no torque limit
        acc = u2 / params.I_a

        def f(b, bd):
            return bd, (gains.k_pbeta * (beta_d - b) - gains.k_vbeta * bd) / params.I_a

        k1 = f(be, bed)
        k2 = f(be + 0.5 * dt * k1[0], bed + 0.5 * dt * k1[1])
        k3 = f(be + 0.5 * dt * k2[0], bed + 0.5 * dt * k2[1])
        k4 = f(be + dt * k3[0], bed + dt * k3[1])
        be += dt * (k1[0] + 2 * (k2[0] + k3[0]) + k4[0]) / 6.0
        bed += dt * (k1[1] + 2 * (k2[1] + k3[1]) + k4[1]) / 6.0
        del acc, u2
    assert abs(be - beta_d) < 1e-6 and abs(bed) < 1e-6


@pytest.mark.parametrize("mode", [MODE_DESIRED_ANGLE, MODE_FEEDFORWARD])
def test_compute_control_matches_steady_state(params, gains, lim_high, mode):
    # even point count straddles alpha = pi/2: exactly upright the steady
    # thrust is non-unique (anything along the rod balances) and the
    # minimal-thrust convention differs from the mapping's continuity limit
    rng = attainable_alpha_range(params, lim_high)
    for a in np.linspace(rng.alpha_min + 0.05, rng.alpha_max - 0.05, 24):
        bd = desired_beta(a, gains, params, lim_high)
        u_ss = steady_state_inputs(a, bd, params)
        cs = ControllerState.create(gains, lim_high, params, mode)
        s = SystemState(x=0.3, alpha=a, beta=bd)
        out = compute_control(s, 0.3, a, gains, params, lim_high, cs, 1e-3)
        assert abs(out.u.u1 - u_ss.u1) < 1e-9
        assert abs(out.u.u2 - u_ss.u2) < 1e-9
        assert abs(out.u.u3 - u_ss.u3) < 1e-9
        assert math.isclose(out.beta_d, bd, rel_tol=1e-12)


def test_compute_control_saturates(params, gains, lim_low):
    cs = ControllerState.create(gains, lim_low, params, MODE_FEEDFORWARD)
    rng = np.random.default_rng(5)
    for _ in range(200):
        s = SystemState(*rng.uniform(-2, 2, 6))
        out = compute_control(s, rng.uniform(-1, 1), rng.uniform(0.3, 2.8),
                              gains, params, lim_low, cs, 1e-3)
        assert 0.0 <= out.u.u1 <= lim_low.T_max
        assert abs(out.u.u2) <= lim_low.tau_max
        assert abs(out.u.u3) <= lim_low.F_max


def test_mapping_dominates_minimal_angle(params, lim_high):
    """gamma*atan(eps*f) >= asin(f / (T_max L)) across the admissible force
    range, for any epsilon: the commanded relative attitude is never shallower
    than the minimal angle that keeps thrust within its ceiling."""
    tl = lim_high.T_max * params.L
    fs = np.linspace(0.0, tl, 500)
    for eps in np.geomspace(0.01, 100.0, 20):
        gam = gamma_param(eps, lim_high, params)
        lhs = gam * np.arctan(eps * fs)
        rhs = np.arcsin(fs / tl)
        assert float(np.min(lhs - rhs)) >= -1e-12


def test_feedforward_error_gain_at_most_one(params, lim_high):
    """The feedforward thrust law acts on the attitude error with gain <= 1,
    sampled over steady angles consistent with the mapping (the force a
    steady angle can deliver at the ceiling is T_max*L*sin(theta_bar))."""
    rng = np.random.default_rng(9)
    tl = lim_high.T_max * params.L
    for _ in range(1000):
        tb = rng.uniform(1e-6, math.pi - 1e-6)
        tt = rng.uniform(-math.pi / 2, math.pi / 2)
        f = rng.uniform(0.0, tl * math.sin(tb))
        if f == 0.0:
            continue
        tf = effective_attitude_error(tb, tt, f, lim_high, params)
        assert abs(tf) <= abs(tt) + 1e-9
