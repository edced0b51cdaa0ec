"""Decentralized PID autopilots (depth, pitch, yaw) and the thruster mixer.

The surge controller owns the total horizontal thrust; these loops only keep
the remaining controlled DOFs pinned at zero.  The depth loop carries a static
buoyancy-trim feedforward so the PID itself only handles residuals, which
keeps the depth excursion well inside its envelope from the first sample.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from .dynamics import ThrusterForces
from .params import VehicleParams

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PidGains:
    k_p: float
    k_i: float = 0.0
    k_d: float = 0.0
    output_limit: float = float("inf")   # symmetric saturation on the demand
    integral_limit: float = float("inf")  # symmetric clamp on the integral state

    def __post_init__(self) -> None:
        if min(self.k_p, self.k_i, self.k_d) < 0:
            raise ValueError("PID gains must be nonnegative")


class Pid:
    """Positional PID with clamped integrator and derivative on measurement."""

    def __init__(self, gains: PidGains):
        self.gains = gains
        self._integral = 0.0
        self._prev_measurement: float | None = None

    def reset(self) -> None:
        self._integral = 0.0
        self._prev_measurement = None

    @property
    def integral(self) -> float:
        return self._integral

    def update(self, error: float, measurement: float, dt: float) -> float:
        if dt <= 0:
            raise ValueError("dt must be positive")
        g = self.gains
        self._integral += error * dt
        self._integral = min(max(self._integral, -g.integral_limit), g.integral_limit)
        if self._prev_measurement is None:
            derivative = 0.0
        else:
            derivative = -(measurement - self._prev_measurement) / dt
        self._prev_measurement = measurement
        out = g.k_p * error + g.k_i * self._integral + g.k_d * derivative
        return min(max(out, -g.output_limit), g.output_limit)


# Gains shaped on the decoupled linearized loops; they hold the pose envelopes
# (|z| <= 5 mm, |theta|, |psi| <= 0.01 rad) with comfortable margin at a 0.1 s
# sample time.
DEFAULT_DEPTH_GAINS = PidGains(k_p=60.0, k_i=10.0, k_d=110.0,
                               output_limit=10.0, integral_limit=3.0)
DEFAULT_PITCH_GAINS = PidGains(k_p=8.0, k_i=0.5, k_d=6.0,
                               output_limit=2.5, integral_limit=1.0)
DEFAULT_YAW_GAINS = PidGains(k_p=8.0, k_i=0.5, k_d=6.0,
                             output_limit=2.5, integral_limit=1.0)


class Autopilots:
    """Depth/pitch/yaw regulators producing the vertical-force and moment demands."""

    def __init__(self, params: VehicleParams,
                 depth: PidGains = DEFAULT_DEPTH_GAINS,
                 pitch: PidGains = DEFAULT_PITCH_GAINS,
                 yaw: PidGains = DEFAULT_YAW_GAINS):
        self.params = params
        self.depth = Pid(depth)
        self.pitch = Pid(pitch)
        self.yaw = Pid(yaw)

    def step(self, eta, dt: float) -> tuple[float, float, float]:
        """Returns (tau_Z, tau_M, tau_N) demands for zero depth/pitch/yaw setpoints."""
        z, theta, psi = float(eta[2]), float(eta[4]), float(eta[5])
        tau_Z = -self.params.net_buoyancy + self.depth.update(-z, z, dt)
        tau_M = self.pitch.update(-theta, theta, dt)
        tau_N = self.yaw.update(-psi, psi, dt)
        return tau_Z, tau_M, tau_N


def mix(T_total: float, tau_M: float, tau_N: float, tau_Z: float,
        params: VehicleParams, per_thruster_limit: float = 7.86) -> ThrusterForces:
    """Invert the allocation: split demands onto the four thrusters.

    Per-thruster saturation is applied with demand priority: the force demands
    (surge, heave) are served first, the moment demands from whatever headroom
    remains on the pair.
    """
    lim = per_thruster_limit
    base_h = min(max(T_total / 2.0, -lim), lim)
    head_h = lim - abs(base_h)
    diff_h = min(max(tau_N / (2.0 * params.l_2), -head_h), head_h)

    base_v = min(max(tau_Z / 2.0, -lim), lim)
    head_v = lim - abs(base_v)
    diff_v = min(max(tau_M / (2.0 * params.l_1), -head_v), head_v)

    if (abs(T_total / 2.0) > lim or abs(tau_Z / 2.0) > lim
            or abs(tau_N / (2.0 * params.l_2)) > head_h
            or abs(tau_M / (2.0 * params.l_1)) > head_v):
        log.debug("thruster mixer saturated: T_total=%.3f tau_Z=%.3f tau_M=%.3f tau_N=%.3f",
                  T_total, tau_Z, tau_M, tau_N)

    return ThrusterForces(T1=base_h + diff_h, T2=base_h - diff_h,
                          T3=base_v + diff_v, T4=base_v - diff_v)
