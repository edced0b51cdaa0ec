"""Request/response models for the HTTP service.

The scenario model mirrors the flat scenario file; every endpoint returns its
key figures structured plus the rendered artifacts under ``files`` so clients
can persist them verbatim.
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from ..params import params_from_mapping
from ..pid import (DEFAULT_DEPTH_GAINS, DEFAULT_PITCH_GAINS,
                   DEFAULT_YAW_GAINS, PidGains)
from ..scenario import Scenario


class GainsModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    k_p: float
    k_i: float = 0.0
    k_d: float = 0.0
    output_limit: float = Field(default=float("inf"))
    integral_limit: float = Field(default=float("inf"))

    @classmethod
    def from_gains(cls, g: PidGains) -> "GainsModel":
        return cls(k_p=g.k_p, k_i=g.k_i, k_d=g.k_d, output_limit=g.output_limit,
                   integral_limit=g.integral_limit)

    def to_gains(self) -> PidGains:
        return PidGains(k_p=self.k_p, k_i=self.k_i, k_d=self.k_d,
                        output_limit=self.output_limit,
                        integral_limit=self.integral_limit)


class PidModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    depth: GainsModel = GainsModel.from_gains(DEFAULT_DEPTH_GAINS)
    pitch: GainsModel = GainsModel.from_gains(DEFAULT_PITCH_GAINS)
    yaw: GainsModel = GainsModel.from_gains(DEFAULT_YAW_GAINS)


class ScenarioModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    vehicle: dict[str, float] = Field(default_factory=dict)
    x0: float = 0.0
    x_f: float = 10.0
    u0: float = 0.0
    controller: Literal["t-mpc", "eo-mpc", "rteo-mpc"] = "rteo-mpc"
    dt: float = 0.1
    stop_tolerance: float = 0.01
    max_sim_time: float = 200.0
    horizon: int = 15
    t_min: float = -15.72
    t_max: float = 15.72
    u_floor: float = 1e-3
    max_iterations: int = 120
    tolerance: float = 1e-8
    warm_start: bool = True
    u_switch_low: Optional[float] = None
    u_switch_high: Optional[float] = None
    x_switch: Optional[float] = None
    oracle_segments: int = 300
    per_thruster_limit: float = 7.86
    pid: PidModel = PidModel()

    def to_scenario(self) -> Scenario:
        return Scenario(
            params=params_from_mapping(self.vehicle),
            x0=self.x0, x_f=self.x_f, u0=self.u0, controller=self.controller,
            dt=self.dt, stop_tolerance=self.stop_tolerance,
            max_sim_time=self.max_sim_time, horizon=self.horizon,
            t_min=self.t_min, t_max=self.t_max, u_floor=self.u_floor,
            max_iterations=self.max_iterations, tolerance=self.tolerance,
            warm_start=self.warm_start, u_switch_low=self.u_switch_low,
            u_switch_high=self.u_switch_high, x_switch=self.x_switch,
            oracle_segments=self.oracle_segments,
            per_thruster_limit=self.per_thruster_limit,
            depth_gains=self.pid.depth.to_gains(),
            pitch_gains=self.pid.pitch.to_gains(),
            yaw_gains=self.pid.yaw.to_gains())


def scenario_to_model(sc: Scenario) -> ScenarioModel:
    """Inverse of ``ScenarioModel.to_scenario`` (used by the thin CLI client)."""
    from dataclasses import asdict

    return ScenarioModel(
        vehicle=asdict(sc.params), x0=sc.x0, x_f=sc.x_f, u0=sc.u0,
        controller=sc.controller, dt=sc.dt, stop_tolerance=sc.stop_tolerance,
        max_sim_time=sc.max_sim_time, horizon=sc.horizon, t_min=sc.t_min,
        t_max=sc.t_max, u_floor=sc.u_floor, max_iterations=sc.max_iterations,
        tolerance=sc.tolerance, warm_start=sc.warm_start,
        u_switch_low=sc.u_switch_low, u_switch_high=sc.u_switch_high,
        x_switch=sc.x_switch, oracle_segments=sc.oracle_segments,
        per_thruster_limit=sc.per_thruster_limit,
        pid=PidModel(depth=GainsModel.from_gains(sc.depth_gains),
                     pitch=GainsModel.from_gains(sc.pitch_gains),
                     yaw=GainsModel.from_gains(sc.yaw_gains)))


class LedgerModel(BaseModel):
    surge_J: float
    heave_J: float
    pitch_J: float
    yaw_J: float
    total_J: float
    t_travel_s: float


class RunSummaryModel(BaseModel):
    controller: str
    energy: LedgerModel
    travel_time_s: float
    avg_solve_s: float
    total_solve_s: float
    solver_invoked_fraction: float
    constraint_violations: list[str]


class SimulateRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    scenario: ScenarioModel = ScenarioModel()


class SimulateResponse(BaseModel):
    summary: RunSummaryModel
    files: dict[str, str]


class ComparisonRowModel(BaseModel):
    controller: str
    travel_time_s: float
    energy_J: float
    loss_pct: Optional[float]
    avg_solve_s: Optional[float]
    total_solve_s: Optional[float]


class CompareResponse(BaseModel):
    rows: list[ComparisonRowModel]
    files: dict[str, str]


class HorizonSweepRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    scenario: ScenarioModel = ScenarioModel()
    horizons: list[int] = [5, 10, 15, 20, 25]
    timing_repeats: int = 10
    include_baseline: bool = True


class HorizonPointModel(BaseModel):
    horizon: int
    energy_J: float
    travel_time_s: float
    avg_solve_s: float
    max_solve_s: float


class HorizonSweepResponse(BaseModel):
    points: list[HorizonPointModel]
    baseline_energy_J: Optional[float]
    files: dict[str, str]


class IcSweepRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    scenario: ScenarioModel = ScenarioModel()
    x0_values: list[float] = [0.0, 2.0, 4.0, 6.0, 8.0, 10.0]
    u0_values: list[float] = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5]
    controllers: list[Literal["t-mpc", "eo-mpc", "rteo-mpc"]] = ["rteo-mpc", "t-mpc"]
    oracle_segments: int = 150


class SweepCellModel(BaseModel):
    x0: float
    u0: float
    controller: str
    energy_J: Optional[float]
    travel_time_s: Optional[float]
    oracle_J: float
    gap_J: Optional[float]
    gap_pct: Optional[float]
    error: str = ""


class IcSweepResponse(BaseModel):
    cells: list[SweepCellModel]
    files: dict[str, str]


class OracleRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    scenario: ScenarioModel = ScenarioModel()


class OracleResponse(BaseModel):
    energy_J: float
    t_travel_s: float
    defect_violation: float
    kkt_residual: float
    files: dict[str, str]


class HealthResponse(BaseModel):
    status: str
    version: str
