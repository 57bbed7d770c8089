"""Scenario orchestration: closed-loop runs, metrics, config and log I/O.

A scenario bundles the physical parameters, actuator limits, controller
gains, thrust law, optional governor, initial state and desired pose, plus
integration/logging settings. Runs are strictly deterministic: a fixed-step
kernel, governor updates on exact step multiples, and log rows on a uniform
decimated grid.

Scenario files are flat ``key = value`` text (dotted keys, SI units, angles
in radians); unknown keys are an error. Logs export as delimiter-separated
values with 9-significant-digit floats, which round-trip losslessly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import _core
from .controller import (MODE_DESIRED_ANGLE, MODE_FEEDFORWARD, ControlGains,
                         ControllerState)
from .dynamics import ActuatorLimits, PhysicalParams, SystemState
from .equilibrium import attainable_alpha_range
from .governor import AppliedReference, RGConfig, rg_step

__all__ = [
    "ReferencePose",
    "ScenarioConfig",
    "TrajectoryLog",
    "Metrics",
    "LOG_COLUMNS",
    "run_scenario",
    "ise_iae",
    "count_violations",
    "builtin_scenarios",
    "export_log",
    "parse_log",
    "scenario_to_text",
    "parse_scenario_text",
    "load_scenario",
    "apply_overrides",
]

LOG_COLUMNS = ("t", "x", "x_dot", "alpha", "alpha_dot", "beta", "beta_dot",
               "u1", "u2", "u3", "u1_unsat", "u2_unsat", "u3_unsat",
               "f_t", "theta_d", "beta_d", "x_a", "alpha_a", "c_star")


@dataclass(frozen=True)
class ReferencePose:
    x_d: float
    alpha_d: float


@dataclass(frozen=True)
class ScenarioConfig:
    params: PhysicalParams
    limits: ActuatorLimits
    gains: ControlGains
    thrust_mode: str = MODE_FEEDFORWARD
    rg: Optional[RGConfig] = None
    initial_state: SystemState = field(default_factory=SystemState)
    ref: ReferencePose = field(default_factory=lambda: ReferencePose(0.0, math.pi / 2))
    t_end: float = 20.0
    dt: float = 1e-3
    log_decimation: int = 10

    def __post_init__(self):
        if not self.t_end > 0.0:
            raise ValueError("t_end must be positive")
        if not self.dt > 0.0:
            raise ValueError("dt must be positive")
        if self.log_decimation < 1:
            raise ValueError("log_decimation must be at least 1")
        if self.thrust_mode not in (MODE_DESIRED_ANGLE, MODE_FEEDFORWARD):
            raise ValueError(f"unknown thrust_mode {self.thrust_mode!r}")


class TrajectoryLog:
    """Uniform time series over the 19 columns in ``LOG_COLUMNS``.

    ``status`` records how the run ended: "ok", "chart_exit" (the rod left
    the model's valid inclination chart [0, pi] and the run was stopped at
    that sample) or "blowup" (non-finite state; partial log).
    """

    def __init__(self, data: np.ndarray, status: str = "ok",
                 rg_infeasible_holds: int = 0):
        if data.ndim != 2 or data.shape[1] != len(LOG_COLUMNS):
            raise ValueError(f"log data must have {len(LOG_COLUMNS)} columns")
        self.data = data
        self.status = status
        # governor updates where even holding the current reference failed
        # the feasibility probe (reference held, flagged); not serialized
        self.rg_infeasible_holds = rg_infeasible_holds

    def __len__(self):
        return self.data.shape[0]

    def column(self, name: str) -> np.ndarray:
        return self.data[:, LOG_COLUMNS.index(name)]

    @property
    def t(self) -> np.ndarray:
        return self.data[:, 0]


@dataclass(frozen=True)
class Metrics:
    ise_alpha: float
    iae_alpha: float
    ise_x: float
    iae_x: float
    constraint_violations: int
    final_error_x: float
    final_error_alpha: float

    def summary_lines(self):
        return [f"ise_alpha = {self.ise_alpha:.6g}",
                f"iae_alpha = {self.iae_alpha:.6g}",
                f"ise_x = {self.ise_x:.6g}",
                f"iae_x = {self.iae_x:.6g}",
                f"constraint_violations = {self.constraint_violations}",
                f"final_error_x = {self.final_error_x:.6g}",
                f"final_error_alpha = {self.final_error_alpha:.6g}"]


def _wrap_array(a: np.ndarray) -> np.ndarray:
    return np.mod(a + math.pi, 2.0 * math.pi) - math.pi


def run_scenario(cfg: ScenarioConfig):
    """Integrate the closed loop and return (TrajectoryLog, Metrics).

    With a governor configured, the applied reference is re-optimized every
    t_s starting at t=0 (initialized at the initial pose); otherwise the
    desired reference is applied as a step from the start. A run stops early,
    flagged in the log status, on numerical blow-up or when the rod leaves
    its inclination chart.
    """
    p, lim, g = cfg.params, cfg.limits, cfg.gains
    cs = ControllerState.create(g, lim, p, cfg.thrust_mode)
    n_total = int(round(cfg.t_end / cfg.dt))
    if abs(n_total * cfg.dt - cfg.t_end) > 1e-9 * max(1.0, cfg.t_end):
        raise ValueError("t_end must be an integer multiple of dt")
    dec = cfg.log_decimation
    cap = n_total // dec + 1
    rec = np.empty((cap, 15))
    refs = np.empty((cap, 3))

    phys = _core.pack_physical(p)
    gains_t = _core.pack_gains(g)
    lims_t = _core.pack_limits(lim, p)
    mode_i = _core.mode_id(cfg.thrust_mode)

    y = (*cfg.initial_state.as_tuple(), 0.0)
    rows = 0
    status = "ok"

    if cfg.rg is None:
        want_final = n_total % dec == 0
        y, st, n_rec = _core.run_segment(
            y, cfg.ref.x_d, cfg.ref.alpha_d, n_total, cfg.dt,
            phys, gains_t, cs.gamma, mode_i, lims_t,
            rec, dec, 0, want_final, True)
        refs[:n_rec, 0] = cfg.ref.x_d
        refs[:n_rec, 1] = cfg.ref.alpha_d
        refs[:n_rec, 2] = 1.0
        rows = n_rec
        status = {0: "ok", 1: "blowup", 3: "chart_exit"}[st]
    else:
        period = int(round(cfg.rg.t_s / cfg.dt))
        if abs(period * cfg.dt - cfg.rg.t_s) > 1e-12:
            raise ValueError("rg.t_s must be an integer multiple of dt")
        applied = AppliedReference(cfg.initial_state.x, cfg.initial_state.alpha)
        step_idx = 0
        hold_errors = 0
        while step_idx < n_total:
            cs.integral_alpha = y[6]
            state = SystemState(*y[:6])
            decision = rg_step(state, cs, applied,
                               (cfg.ref.x_d, cfg.ref.alpha_d),
                               cfg.rg, g, p, lim)
            applied = decision.ref
            if not decision.applied_feasible:
                hold_errors += 1
            n_seg = min(period, n_total - step_idx)
            last = step_idx + n_seg == n_total
            y, st, n_rec = _core.run_segment(
                y, applied.x_a, applied.alpha_a, n_seg, cfg.dt,
                phys, gains_t, cs.gamma, mode_i, lims_t,
                rec[rows:], dec, step_idx, last and n_total % dec == 0, True)
            refs[rows:rows + n_rec, 0] = applied.x_a
            refs[rows:rows + n_rec, 1] = applied.alpha_a
            refs[rows:rows + n_rec, 2] = decision.c
            rows += n_rec
            step_idx += n_seg
            if st != 0:
                status = {1: "blowup", 3: "chart_exit"}[st]
                break

    data = np.empty((rows, len(LOG_COLUMNS)))
    data[:, 0] = np.arange(rows, dtype=float) * (cfg.dt * dec)
    data[:, 1:16] = rec[:rows]
    data[:, 5] = _wrap_array(data[:, 5])  # beta wrapped at readout only
    data[:, 16:19] = refs[:rows]
    log = TrajectoryLog(data, status,
                        rg_infeasible_holds=(hold_errors if cfg.rg else 0))
    metrics = ise_iae(log, cfg.ref.x_d, cfg.ref.alpha_d, params=p, limits=lim)
    return log, metrics


def ise_iae(log: TrajectoryLog, x_d: float, alpha_d: float,
            params: PhysicalParams | None = None,
            limits: ActuatorLimits | None = None) -> Metrics:
    """Tracking indices over the full logged window (trapezoidal rule).

    Constraint violations are counted when params and limits are provided,
    otherwise reported as zero.
    """
    if len(log) == 0:
        raise ValueError("empty log")
    t = log.t
    e_a = alpha_d - log.column("alpha")
    e_x = x_d - log.column("x")
    violations = 0
    if params is not None and limits is not None:
        violations = count_violations(log, params, limits)
    return Metrics(
        ise_alpha=float(np.trapezoid(e_a * e_a, t)),
        iae_alpha=float(np.trapezoid(np.abs(e_a), t)),
        ise_x=float(np.trapezoid(e_x * e_x, t)),
        iae_x=float(np.trapezoid(np.abs(e_x), t)),
        constraint_violations=violations,
        final_error_x=abs(float(e_x[-1])),
        final_error_alpha=abs(float(e_a[-1])),
    )


def count_violations(log: TrajectoryLog, p: PhysicalParams,
                     lim: ActuatorLimits) -> int:
    """Logged samples whose raw commanded inputs exceed the actuator bounds
    or whose inclination left the attainable equilibrium arc."""
    rng = attainable_alpha_range(p, lim)
    u1u = log.column("u1_unsat")
    u2u = log.column("u2_unsat")
    u3u = log.column("u3_unsat")
    al = log.column("alpha")
    bad = ((u1u < 0.0) | (u1u > lim.T_max)
           | (np.abs(u2u) > lim.tau_max)
           | (np.abs(u3u) > lim.F_max)
           | (al < rng.alpha_min) | (al > rng.alpha_max))
    return int(np.count_nonzero(bad))


# ---------------------------------------------------------------------------
# reference scenario set
# ---------------------------------------------------------------------------

def _base_params() -> PhysicalParams:
    return PhysicalParams(m_a=0.1, I_a=1.014e-3, m_s=1.0, m_b=0.03, I_b=2.0,
                          L=1.25, d_G=0.625, g=9.81,
                          zeta_x=1.5, zeta_alpha=0.1, zeta_beta=0.05)


def _base_gains(k_i: float = 0.0) -> ControlGains:
    return ControlGains(k_px=20.0, k_vx=8.5, k_palpha=1.0, k_valpha=1.5,
                        k_pbeta=3.0, k_vbeta=2.85, epsilon=2.4, k_i=k_i)


def builtin_scenarios() -> dict:
    """The four reference-comparison scenarios plus the hardware-replica one.

    Shared: identical rig parameters and gains, start at rest with the rod
    upright, step the desired pose to x=0.5 m, alpha=3pi/4 (the replica
    targets pi/2 + pi/9 and adds the small integral term). The two
    low-thrust scenarios cut T_max to 0.85 N; "rg" adds the governor and
    runs 60 s so the filtered reference has settled.
    """
    p = _base_params()
    init = SystemState(x=0.0, x_dot=0.0, alpha=math.pi / 2, alpha_dot=0.0,
                       beta=math.pi / 2, beta_dot=0.0)
    ref = ReferencePose(x_d=0.5, alpha_d=3.0 * math.pi / 4.0)
    lim_hi = ActuatorLimits(T_max=5.0, tau_max=0.2, F_max=20.0)
    lim_lo = ActuatorLimits(T_max=0.85, tau_max=0.2, F_max=20.0)
    # dt: the closed inner loop has a fast real pole at k_vbeta/I_a ~ 2.8e3
    # 1/s; fixed-step RK4 needs dt < 2.78/|pole| ~ 1e-3, so run well inside
    # that bound. Decimation keeps 100 Hz logs.
    base = dict(params=p, gains=_base_gains(), initial_state=init, ref=ref,
                t_end=20.0, dt=2e-4, log_decimation=50)
    return {
        "no-feedforward": ScenarioConfig(limits=lim_hi,
                                         thrust_mode=MODE_DESIRED_ANGLE, **base),
        "feedforward": ScenarioConfig(limits=lim_hi,
                                      thrust_mode=MODE_FEEDFORWARD, **base),
        "no-rg": ScenarioConfig(limits=lim_lo,
                                thrust_mode=MODE_FEEDFORWARD, **base),
        "rg": replace(ScenarioConfig(limits=lim_lo,
                                     thrust_mode=MODE_FEEDFORWARD, **base),
                      rg=RGConfig(), t_end=60.0),
        "experiment": replace(ScenarioConfig(limits=lim_hi,
                                             thrust_mode=MODE_FEEDFORWARD, **base),
                              gains=_base_gains(k_i=0.001),
                              ref=ReferencePose(x_d=0.5,
                                                alpha_d=math.pi / 2 + math.pi / 9)),
    }


# ---------------------------------------------------------------------------
# log export / parse
# ---------------------------------------------------------------------------

def export_log(log: TrajectoryLog, path, fmt: str = "csv") -> None:
    """Write the log as delimiter-separated values, 9 significant digits."""
    if fmt != "csv":
        raise ValueError(f"unsupported format {fmt!r}")
    with open(path, "w") as fh:
        fh.write(",".join(LOG_COLUMNS) + "\n")
        for row in log.data:
            fh.write(",".join(f"{v:.9g}" for v in row) + "\n")


def parse_log(path) -> TrajectoryLog:
    with open(path) as fh:
        header = fh.readline().rstrip("\n")
        if tuple(header.split(",")) != LOG_COLUMNS:
            raise ValueError("log header does not match the expected columns")
        rows = [[float(v) for v in line.split(",")] for line in fh if line.strip()]
    data = np.array(rows, dtype=float).reshape(len(rows), len(LOG_COLUMNS))
    return TrajectoryLog(data)


# ---------------------------------------------------------------------------
# scenario files: flat `key = value` text
# ---------------------------------------------------------------------------

_PARAM_KEYS = ("m_a", "I_a", "m_s", "m_b", "I_b", "L", "d_G", "g",
               "zeta_x", "zeta_alpha", "zeta_beta")
_LIMIT_KEYS = ("T_max", "tau_max", "F_max")
_GAIN_KEYS = ("k_px", "k_vx", "k_palpha", "k_valpha", "k_pbeta", "k_vbeta",
              "epsilon", "k_i", "i_sat")
_STATE_KEYS = ("x", "x_dot", "alpha", "alpha_dot", "beta", "beta_dot")
_RG_FLOAT_KEYS = ("t_s", "t_h", "dt", "margin_u", "alpha_margin")


def scenario_to_text(cfg: ScenarioConfig) -> str:
    lines = []
    for k in _PARAM_KEYS:
        lines.append(f"params.{k} = {getattr(cfg.params, k)!r}")
    for k in _LIMIT_KEYS:
        lines.append(f"limits.{k} = {getattr(cfg.limits, k)!r}")
    for k in _GAIN_KEYS:
        lines.append(f"gains.{k} = {getattr(cfg.gains, k)!r}")
    lines.append(f"thrust_mode = {cfg.thrust_mode}")
    lines.append(f"rg.enabled = {'true' if cfg.rg is not None else 'false'}")
    if cfg.rg is not None:
        for k in _RG_FLOAT_KEYS:
            lines.append(f"rg.{k} = {getattr(cfg.rg, k)!r}")
        lines.append(f"rg.bisection_iters = {cfg.rg.bisection_iters}")
        lines.append("rg.enforce_alpha_range = "
                     + ("true" if cfg.rg.enforce_alpha_range else "false"))
    for k in _STATE_KEYS:
        lines.append(f"initial_state.{k} = {getattr(cfg.initial_state, k)!r}")
    lines.append(f"desired_ref.x_d = {cfg.ref.x_d!r}")
    lines.append(f"desired_ref.alpha_d = {cfg.ref.alpha_d!r}")
    lines.append(f"t_end = {cfg.t_end!r}")
    lines.append(f"dt = {cfg.dt!r}")
    lines.append(f"log_decimation = {cfg.log_decimation}")
    return "\n".join(lines) + "\n"


def _parse_bool(key: str, raw: str) -> bool:
    if raw == "true":
        return True
    if raw == "false":
        return False
    raise ValueError(f"{key}: expected true/false, got {raw!r}")


def _parse_float(key: str, raw: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ValueError(f"{key}: not a number: {raw!r}") from None


def parse_scenario_text(text: str) -> ScenarioConfig:
    """Parse flat key-value scenario text; unknown keys raise by name."""
    kv = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ValueError(f"line {lineno}: expected 'key = value'")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        raw = raw.strip()
        if key in kv:
            raise ValueError(f"duplicate key {key}")
        kv[key] = raw
    return _scenario_from_kv(kv)


def _scenario_from_kv(kv: dict) -> ScenarioConfig:
    known = set()

    def take_float(key, default=None):
        known.add(key)
        if key in kv:
            return _parse_float(key, kv[key])
        if default is None:
            raise ValueError(f"missing required key {key}")
        return default

    params = PhysicalParams(**{k: take_float(f"params.{k}") for k in _PARAM_KEYS[:7]},
                            g=take_float("params.g", 9.81),
                            **{k: take_float(f"params.{k}", 0.0) for k in _PARAM_KEYS[8:]})
    limits = ActuatorLimits(**{k: take_float(f"limits.{k}") for k in _LIMIT_KEYS})
    gains = ControlGains(**{k: take_float(f"gains.{k}") for k in _GAIN_KEYS[:7]},
                         k_i=take_float("gains.k_i", 0.0),
                         i_sat=take_float("gains.i_sat", 0.5))
    known.add("thrust_mode")
    thrust_mode = kv.get("thrust_mode", MODE_FEEDFORWARD)
    known.add("rg.enabled")
    rg = None
    if "rg.enabled" in kv and _parse_bool("rg.enabled", kv["rg.enabled"]):
        defaults = RGConfig()
        flo = {k: take_float(f"rg.{k}", getattr(defaults, k))
               for k in _RG_FLOAT_KEYS}
        known.add("rg.bisection_iters")
        try:
            iters = int(kv.get("rg.bisection_iters", defaults.bisection_iters))
        except ValueError:
            raise ValueError("rg.bisection_iters: not an integer") from None
        known.add("rg.enforce_alpha_range")
        enforce = defaults.enforce_alpha_range
        if "rg.enforce_alpha_range" in kv:
            enforce = _parse_bool("rg.enforce_alpha_range",
                                  kv["rg.enforce_alpha_range"])
        rg = RGConfig(bisection_iters=iters, enforce_alpha_range=enforce, **flo)
    else:
        for k in _RG_FLOAT_KEYS:
            known.add(f"rg.{k}")
        known.update({"rg.bisection_iters", "rg.enforce_alpha_range"})
        stray = [k for k in kv if k.startswith("rg.") and k != "rg.enabled"]
        if stray and kv.get("rg.enabled", "false") == "false":
            raise ValueError(f"rg keys given but rg.enabled is false: {stray[0]}")
    init = SystemState(**{k: take_float(f"initial_state.{k}", 0.0)
                          for k in _STATE_KEYS})
    ref = ReferencePose(x_d=take_float("desired_ref.x_d"),
                        alpha_d=take_float("desired_ref.alpha_d"))
    t_end = take_float("t_end")
    dt = take_float("dt", 1e-3)
    known.add("log_decimation")
    try:
        dec = int(kv.get("log_decimation", 10))
    except ValueError:
        raise ValueError("log_decimation: not an integer") from None

    unknown = sorted(set(kv) - known)
    if unknown:
        raise ValueError(f"unknown key {unknown[0]}")
    return ScenarioConfig(params=params, limits=limits, gains=gains,
                          thrust_mode=thrust_mode, rg=rg, initial_state=init,
                          ref=ref, t_end=t_end, dt=dt, log_decimation=dec)


def load_scenario(path) -> ScenarioConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ValueError(f"cannot read scenario file {path}: {exc}") from exc
    return parse_scenario_text(text)


def apply_overrides(cfg: ScenarioConfig, overrides) -> ScenarioConfig:
    """Apply repeatable ``key=value`` overrides (same grammar as the files)."""
    kv = {}
    for item in overrides:
        if "=" not in item:
            raise ValueError(f"override {item!r} is not of the form key=value")
        key, _, raw = item.partition("=")
        kv[key.strip()] = raw.strip()
    text = scenario_to_text(cfg)
    base = {}
    for line in text.splitlines():
        key, _, raw = line.partition("=")
        base[key.strip()] = raw.strip()
    if "rg.enabled" in kv and kv["rg.enabled"] == "true" \
            and base.get("rg.enabled") == "false":
        defaults = RGConfig()
        for k in _RG_FLOAT_KEYS:
            base[f"rg.{k}"] = repr(getattr(defaults, k))
        base["rg.bisection_iters"] = str(defaults.bisection_iters)
        base["rg.enforce_alpha_range"] = (
            "true" if defaults.enforce_alpha_range else "false")
    base.update(kv)
    if base.get("rg.enabled") == "false":
        base = {k: v for k, v in base.items()
                if not k.startswith("rg.") or k == "rg.enabled"}
    return _scenario_from_kv(base)
