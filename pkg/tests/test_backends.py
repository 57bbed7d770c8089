import math

import numpy as np
import pytest

from aircart import _core
from aircart.controller import ControllerState, compute_control
from aircart.dynamics import Inputs, SystemState, step
from aircart.harness import builtin_scenarios

BACKENDS = _core.available_backends()


def _packed(cfg):
    return (_core.pack_physical(cfg.params), _core.pack_gains(cfg.gains),
            _core.pack_limits(cfg.limits, cfg.params))


@pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled backend not built")
def test_run_segment_bit_identical():
    cfg = builtin_scenarios()["feedforward"]
    phys, gt, lt = _packed(cfg)
    cs = ControllerState.create(cfg.gains, cfg.limits, cfg.params,
                                cfg.thrust_mode)
    y0 = (*cfg.initial_state.as_tuple(), 0.0)
    results = {}
    for name, mod in BACKENDS.items():
        out = np.zeros((501, 15))
        results[name] = (*mod.run_segment(y0, 0.5, 3 * math.pi / 4, 5000,
                                          2e-4, phys, gt, cs.gamma, 1, lt,
                                          out, 10, 0, True, True), out)
    (ya, sa, na, oa), (yb, sb, nb, ob) = results.values()
    assert ya == yb and sa == sb and na == nb
    assert np.array_equal(oa, ob)


@pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled backend not built")
def test_check_segment_bit_identical():
    cfg = builtin_scenarios()["rg"]
    phys, gt, lt = _packed(cfg)
    cs = ControllerState.create(cfg.gains, cfg.limits, cfg.params,
                                cfg.thrust_mode)
    y0 = (*cfg.initial_state.as_tuple(), 0.0)
    args = (y0, 0.2, math.pi / 2 + 0.3, 8000, 5e-4, phys, gt, cs.gamma, 1, lt,
            0.98 * 0.85, 0.98 * 0.2, 0.98 * 20.0, 0.7375, 2.4041, True)
    codes = {name: mod.check_segment(*args) for name, mod in BACKENDS.items()}
    vals = list(codes.values())
    assert vals[0] == vals[1]


@pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled backend not built")
def test_run_plant_bit_identical():
    cfg = builtin_scenarios()["feedforward"]
    phys = _core.pack_physical(cfg.params)
    y0 = (0.1, -0.2, 1.1, 0.4, 0.9, -0.3)
    results = {}
    for name, mod in BACKENDS.items():
        out = np.zeros((101, 6))
        results[name] = (*mod.run_plant(y0, 0.4, 0.01, 1.2, 1000, 1e-3,
                                        phys, out, 10), out)
    (ya, sa, na, oa), (yb, sb, nb, ob) = results.values()
    assert ya == yb and sa == sb and na == nb
    assert np.array_equal(oa, ob)


def test_kernel_matches_reference_functions():
    """One kernel step must equal compute_control + dynamics.step exactly."""
    cfg = builtin_scenarios()["feedforward"]
    phys, gt, lt = _packed(cfg)
    for mode in ("desired_angle", "feedforward"):
        cs = ControllerState.create(cfg.gains, cfg.limits, cfg.params, mode)
        s = SystemState(0.05, -0.1, 1.3, 0.2, 1.1, -0.4)
        out_ref = compute_control(s, 0.5, 2.0, cfg.gains, cfg.params,
                                  cfg.limits, cs, 2e-4)
        s_ref = step(s, out_ref.u, cfg.params, 2e-4)

        rec = np.zeros((1, 15))
        y0 = (*s.as_tuple(), 0.0)
        mod = _core.available_backends()[_core.backend_name()]
        yf, status, n_rec = mod.run_segment(
            y0, 0.5, 2.0, 1, 2e-4, phys, gt, cs.gamma,
            _core.mode_id(mode), lt, rec, 1, 0, False, False)
        assert status == 0 and n_rec == 1
        assert yf[:6] == s_ref.as_tuple()
        assert rec[0, 6] == out_ref.u.u1
        assert rec[0, 7] == out_ref.u.u2
        assert rec[0, 8] == out_ref.u.u3
        assert rec[0, 9] == out_ref.u_unsat.u1
        assert rec[0, 10] == out_ref.u_unsat.u2
        assert rec[0, 11] == out_ref.u_unsat.u3
        assert rec[0, 12] == out_ref.f_t
        assert rec[0, 13] == out_ref.theta_d
        assert rec[0, 14] == out_ref.beta_d


def test_blowup_status():
    cfg = builtin_scenarios()["feedforward"]
    phys = _core.pack_physical(cfg.params)
    for mod in BACKENDS.values():
        y0 = (0.0, 1e308, 1.0, 0.0, 0.0, 0.0)
        _, status, _ = mod.run_plant(y0, 0.0, 0.0, 1e308, 50, 1.0, phys,
                                     None, 1)
        assert status == 1


def test_backend_name():
    assert _core.backend_name() in ("compiled", "python")
