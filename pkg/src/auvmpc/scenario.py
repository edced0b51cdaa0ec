"""Scenario configuration: one flat INI-style file describes a closed-loop run.

Four sections are recognized (all optional, defaults built in): ``[vehicle]``
with the physical parameter symbols, ``[scenario]`` with endpoints and run
control, ``[controller]`` with horizon/bounds/switching settings, and
``[pid]`` with the three autopilot gain sets.  Unknown sections or keys are
rejected outright.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, replace
from pathlib import Path

from .mpc import MpcConfig, SwitchConfig
from .params import VehicleParams, params_from_mapping
from .pid import (DEFAULT_DEPTH_GAINS, DEFAULT_PITCH_GAINS, DEFAULT_YAW_GAINS,
                  PidGains)

CONTROLLERS = ("t-mpc", "eo-mpc", "rteo-mpc")


@dataclass(frozen=True)
class Scenario:
    params: VehicleParams = field(default_factory=VehicleParams)
    x0: float = 0.0
    x_f: float = 10.0
    u0: float = 0.0
    controller: str = "rteo-mpc"
    dt: float = 0.1                    # [s] control/plant step
    stop_tolerance: float = 0.01       # [m] arrival threshold on x
    max_sim_time: float = 200.0        # [s]
    horizon: int = 15
    t_min: float = -15.72              # [N] total horizontal thrust bounds
    t_max: float = 15.72
    u_floor: float = 1e-3
    max_iterations: int = 120
    tolerance: float = 1e-8
    warm_start: bool = True
    u_switch_low: float | None = None  # None: derived from the vehicle
    u_switch_high: float | None = None
    x_switch: float | None = None
    oracle_segments: int = 300
    per_thruster_limit: float = 7.86
    depth_gains: PidGains = DEFAULT_DEPTH_GAINS
    pitch_gains: PidGains = DEFAULT_PITCH_GAINS
    yaw_gains: PidGains = DEFAULT_YAW_GAINS

    def __post_init__(self) -> None:
        if self.x_f < self.x0:
            raise ValueError("x_f must be >= x0")
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.u0 < 0:
            raise ValueError("u0 must be nonnegative")
        if self.controller not in CONTROLLERS:
            raise ValueError(f"controller must be one of {CONTROLLERS}")
        if self.max_sim_time <= 0 or self.stop_tolerance < 0:
            raise ValueError("bad run-control settings")

    def mpc_config(self) -> MpcConfig:
        return MpcConfig(horizon=self.horizon, dt=self.dt, t_min=self.t_min,
                         t_max=self.t_max, x_f=self.x_f, u_floor=self.u_floor,
                         max_iterations=self.max_iterations,
                         tolerance=self.tolerance, warm_start=self.warm_start)

    def switch_config(self) -> SwitchConfig:
        base = SwitchConfig.from_params(self.params, self.x_f)
        sw = SwitchConfig(
            u_switch_low=self.u_switch_low if self.u_switch_low is not None
            else base.u_switch_low,
            u_switch_high=self.u_switch_high if self.u_switch_high is not None
            else base.u_switch_high,
            x_switch=self.x_switch if self.x_switch is not None
            else base.x_switch)
        if sw.x_switch >= self.x_f:
            raise ValueError("x_switch must lie before the destination")
        return sw


_SCENARIO_KEYS = {
    "x0": float, "x_f": float, "u0": float, "controller": str, "dt": float,
    "stop_tolerance": float, "max_sim_time": float,
}
_CONTROLLER_KEYS = {
    "horizon": int, "t_min": float, "t_max": float, "u_floor": float,
    "max_iterations": int, "tolerance": float, "warm_start": bool,
    "u_switch_low": float, "u_switch_high": float, "x_switch": float,
    "oracle_segments": int, "per_thruster_limit": float,
}
_PID_PREFIXES = {"depth": "depth_gains", "pitch": "pitch_gains", "yaw": "yaw_gains"}
_PID_FIELDS = {"kp": "k_p", "ki": "k_i", "kd": "k_d",
               "output_limit": "output_limit", "integral_limit": "integral_limit"}


def _parse_bool(raw: str) -> bool:
    low = raw.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {raw!r}")


def scenario_from_text(text: str) -> Scenario:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str  # vehicle symbols are case sensitive
    cp.read_string(text)

    known_sections = {"vehicle", "scenario", "controller", "pid"}
    unknown = set(cp.sections()) - known_sections
    if unknown:
        raise ValueError(f"unknown scenario sections: {sorted(unknown)}")

    kwargs: dict = {}
    if cp.has_section("vehicle"):
        kwargs["params"] = params_from_mapping(dict(cp.items("vehicle")))

    if cp.has_section("scenario"):
        for key, raw in cp.items("scenario"):
            if key not in _SCENARIO_KEYS:
                raise ValueError(f"unknown [scenario] key {key!r}")
            conv = _SCENARIO_KEYS[key]
            kwargs[key] = raw.strip().lower() if conv is str else conv(raw)

    if cp.has_section("controller"):
        for key, raw in cp.items("controller"):
            if key not in _CONTROLLER_KEYS:
                raise ValueError(f"unknown [controller] key {key!r}")
            conv = _CONTROLLER_KEYS[key]
            kwargs[key] = _parse_bool(raw) if conv is bool else conv(raw)

    if cp.has_section("pid"):
        gains = {name: {} for name in _PID_PREFIXES}
        for key, raw in cp.items("pid"):
            prefix, _, rest = key.partition("_")
            if prefix not in _PID_PREFIXES or rest not in _PID_FIELDS:
                raise ValueError(f"unknown [pid] key {key!r}")
            gains[prefix][_PID_FIELDS[rest]] = float(raw)
        defaults = {"depth": DEFAULT_DEPTH_GAINS, "pitch": DEFAULT_PITCH_GAINS,
                    "yaw": DEFAULT_YAW_GAINS}
        for name, overrides in gains.items():
            if overrides:
                kwargs[_PID_PREFIXES[name]] = replace(defaults[name], **overrides)

    return Scenario(**kwargs)


def scenario_from_file(path: str | Path) -> Scenario:
    return scenario_from_text(Path(path).read_text())
