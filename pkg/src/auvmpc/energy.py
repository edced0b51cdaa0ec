"""Trip-energy accounting, hover power, and the static cruise-speed optimum.

The steady-cruise energy economy of a positively buoyant vehicle is a
trade-off: the vertical thrusters burn a constant hover power ``P_pb`` for as
long as the trip lasts, while surge drag power grows with speed cubed.  The
energy-per-distance curve makes that trade-off explicit and its minimizer is
the best constant cruise speed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .dynamics import ThrusterForces, thruster_power
from .params import VehicleParams


@dataclass
class EnergyLedger:
    """Cumulative energy [J] per controlled DOF plus travel time [s].

    ``total`` always equals the sum of the four components, which in turn
    equals the plain per-thruster power sum over the logged inputs.
    """

    surge: float = 0.0
    heave: float = 0.0
    pitch: float = 0.0
    yaw: float = 0.0
    total: float = 0.0
    t_travel: float = 0.0

    CSV_HEADER = "surge_J,heave_J,pitch_J,yaw_J,total_J,t_travel_s"

    def csv_row(self) -> str:
        return (f"{self.surge:.9g},{self.heave:.9g},{self.pitch:.9g},"
                f"{self.yaw:.9g},{self.total:.9g},{self.t_travel:.9g}")


def _attribute_pair(Ta: float, Tb: float, params: VehicleParams) -> tuple[float, float, float]:
    """Split a thruster pair's power into common-mode and differential shares.

    Returns (pair power, common share, differential share).  The shares are
    normalized so they sum to the true pair power even though the power law is
    nonlinear in force.
    """
    p_true = thruster_power(Ta, params) + thruster_power(Tb, params)
    p_common = 2.0 * thruster_power(0.5 * (Ta + Tb), params)
    p_diff = 2.0 * thruster_power(0.5 * (Ta - Tb), params)
    denom = p_common + p_diff
    if denom <= 0.0:
        return 0.0, 0.0, 0.0
    return p_true, p_true * p_common / denom, p_true * p_diff / denom


def trip_energy(inputs: Iterable[ThrusterForces], dt: float,
                params: VehicleParams) -> EnergyLedger:
    """Integrate thruster power over an input sequence sampled every dt seconds.

    The horizontal pair's energy is attributed to surge (common mode) and yaw
    (differential), the vertical pair's to heave and pitch.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    ledger = EnergyLedger()
    n = 0
    for T in inputs:
        _, surge_p, yaw_p = _attribute_pair(T.T1, T.T2, params)
        _, heave_p, pitch_p = _attribute_pair(T.T3, T.T4, params)
        ledger.surge += surge_p * dt
        ledger.yaw += yaw_p * dt
        ledger.heave += heave_p * dt
        ledger.pitch += pitch_p * dt
        n += 1
    ledger.total = ledger.surge + ledger.heave + ledger.pitch + ledger.yaw
    ledger.t_travel = n * dt
    return ledger


def heave_hover_power(params: VehicleParams) -> float:
    """Constant power [W] the vertical pair spends holding depth against net buoyancy.

    Each vertical thruster carries half of ``B - W``, which collapses to
    ``(sqrt(2)/2) * C_p * (B - W)**1.5``.
    """
    net = params.net_buoyancy
    if net < 0:
        raise ValueError("hover power model assumes positive buoyancy (B >= W)")
    return math.sqrt(2.0) / 2.0 * params.C_p * net ** 1.5


def drag_power_coefficient(params: VehicleParams) -> float:
    """Coefficient a [W s^3/m^3] of the cubic surge-drag power term a*u^3."""
    return math.sqrt(2.0) / 2.0 * params.C_p * params.X_uu ** 1.5


def energy_per_distance(u: float, params: VehicleParams) -> float:
    """Steady-cruise energy cost per meter [J/m] at surge speed u > 0.

    Quadratic drag share plus the hover power spread over the distance covered
    per second: ``a*u^2 + P_pb/u``.
    """
    if u <= 0:
        raise ValueError("cruise speed must be positive")
    return drag_power_coefficient(params) * u * u + heave_hover_power(params) / u


def static_optimal_velocity(params: VehicleParams) -> float:
    """Cruise speed [m/s] minimizing energy per distance (closed form).

    Stationarity of ``a*u^2 + P_pb/u`` gives ``u* = (P_pb / (2a))**(1/3)``; the
    second derivative ``2a + 2*P_pb/u^3`` is positive there, so it is the
    unique minimum on u > 0.
    """
    net = params.net_buoyancy
    if net <= 0:
        raise ValueError("optimal cruise speed degenerates to 0 without positive buoyancy")
    return (heave_hover_power(params) / (2.0 * drag_power_coefficient(params))) ** (1.0 / 3.0)


def static_trip_cost(distance: float, params: VehicleParams,
                     u: float | None = None) -> float:
    """Constant-speed trip energy [J] over ``distance`` at cruise speed u
    (defaults to the static optimum)."""
    if distance < 0:
        raise ValueError("distance must be nonnegative")
    if distance == 0:
        return 0.0
    if u is None:
        u = static_optimal_velocity(params)
    return distance * energy_per_distance(u, params)


def grid_search_optimal_velocity(params: VehicleParams, lo: float = 1e-5,
                                 hi: float = 1.0, step: float = 1e-5) -> float:
    """Brute-force minimizer of energy per distance, used as a test oracle."""
    import numpy as np

    u = np.arange(lo, hi + step, step)
    cost = drag_power_coefficient(params) * u * u + heave_hover_power(params) / u
    return float(u[int(np.argmin(cost))])
