import dataclasses

import pytest

from aircart.controller import ControlGains
from aircart.dynamics import ActuatorLimits, PhysicalParams


@pytest.fixture
def params():
    """Reference rig parameters (SI)."""
    return PhysicalParams(m_a=0.1, I_a=1.014e-3, m_s=1.0, m_b=0.03, I_b=2.0,
                          L=1.25, d_G=0.625, g=9.81,
                          zeta_x=1.5, zeta_alpha=0.1, zeta_beta=0.05)


@pytest.fixture
def params_frictionless(params):
    return dataclasses.replace(params, zeta_x=0.0, zeta_alpha=0.0, zeta_beta=0.0)


@pytest.fixture
def gains():
    return ControlGains(k_px=20.0, k_vx=8.5, k_palpha=1.0, k_valpha=1.5,
                        k_pbeta=3.0, k_vbeta=2.85, epsilon=2.4)


@pytest.fixture
def lim_high():
    return ActuatorLimits(T_max=5.0, tau_max=0.2, F_max=20.0)


@pytest.fixture
def lim_low():
    return ActuatorLimits(T_max=0.85, tau_max=0.2, F_max=20.0)
