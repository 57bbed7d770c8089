"""Deterministic simulation and control of a planar UAV + cart rod team.

Subsystems:

* :mod:`aircart.dynamics`    -- manipulator-form plant model, RK4 stepping.
* :mod:`aircart.equilibrium` -- attainable steady poses under saturation.
* :mod:`aircart.controller`  -- cart PD + UAV cascade with the saturating
  arctan thrust mapping.
* :mod:`aircart.stability`   -- numerically evaluated stability certificate.
* :mod:`aircart.governor`    -- simulation-based scalar reference governor.
* :mod:`aircart.harness`     -- scenarios, metrics, log/config I/O.
* :mod:`aircart.cli`         -- ``aircart`` command-line tool.

The closed-loop rollout kernel is compiled (Cython) when available, with a
bit-identical pure-Python fallback; see :func:`aircart.backend_name`.
"""

from ._core import backend_name
from .controller import (ControlGains, ControllerState, ControlOutput,
                         MODE_DESIRED_ANGLE, MODE_FEEDFORWARD)
from .dynamics import (ActuatorLimits, BlowupError, Inputs, PhysicalParams,
                       SystemState)
from .equilibrium import (AlphaRange, BetaRange, attainable_alpha_range,
                          attainable_beta_range, desired_beta,
                          steady_state_inputs)
from .governor import AppliedReference, RGConfig, predict_feasible, rg_step
from .harness import (Metrics, ReferencePose, ScenarioConfig, TrajectoryLog,
                      builtin_scenarios, export_log, ise_iae, load_scenario,
                      parse_log, run_scenario)
from .stability import StabilityCertificate, compute_certificate

__version__ = "1.0.0"

__all__ = [
    "ActuatorLimits", "AlphaRange", "AppliedReference", "BetaRange",
    "BlowupError", "ControlGains", "ControllerState", "ControlOutput",
    "Inputs", "Metrics", "MODE_DESIRED_ANGLE", "MODE_FEEDFORWARD",
    "PhysicalParams", "ReferencePose", "RGConfig", "ScenarioConfig",
    "StabilityCertificate", "SystemState", "TrajectoryLog", "backend_name",
    "attainable_alpha_range", "attainable_beta_range", "builtin_scenarios",
    "compute_certificate", "desired_beta", "export_log", "ise_iae",
    "load_scenario", "parse_log", "predict_feasible", "rg_step",
    "run_scenario", "steady_state_inputs",
]
