"""Closed-loop simulation engine and the batch experiment drivers.

The engine wires the full plant, the three pose autopilots and the selected
surge controller at a common sampling time, logs every step, and accounts for
energy from the logged thruster forces.  On top of it sit the experiment
drivers: controller comparison against the collocation baseline, the
prediction-horizon sweep, and the initial-condition robustness sweep.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import collocation
from .dynamics import (ThrusterForces, VehicleState, integrate_step,
                       thruster_allocation)
from .energy import EnergyLedger, trip_energy
from .mpc import ControlDecision, EnergyOptimalMpc, SwitchingMpc, TrackingMpc
from .pid import Autopilots, mix
from .scenario import Scenario


@dataclass
class SimLog:
    """Per-step records of one closed-loop run plus derived statistics."""

    t: np.ndarray                  # [s] step start times
    nu: np.ndarray                 # (n, 6) body velocities at step start
    eta: np.ndarray                # (n, 6) pose at step start
    thrusters: np.ndarray          # (n, 4) forces applied over [t, t+dt)
    T_total: np.ndarray            # (n,) surge controller demand
    solver_invoked: np.ndarray     # (n,) bool
    solve_time: np.ndarray         # (n,) [s]
    predicted_cost: np.ndarray     # (n,)
    ledger: EnergyLedger
    reached: bool
    t_travel: float                # [s] arrival-crossing time
    final_state: VehicleState
    scenario: Scenario

    @property
    def steps(self) -> int:
        return len(self.t)

    @property
    def total_solve_time(self) -> float:
        return float(np.sum(self.solve_time))

    @property
    def avg_solve_time(self) -> float:
        return float(np.mean(self.solve_time)) if self.steps else 0.0

    def thruster_forces(self) -> list[ThrusterForces]:
        return [ThrusterForces(*row) for row in self.thrusters]


class MaxSimTimeExceeded(RuntimeError):
    """The vehicle failed to arrive within the scenario's time budget.

    The partial run is attached as the ``log`` attribute.
    """

    def __init__(self, message: str, log: "SimLog"):
        super().__init__(message)
        self.log = log


def _make_controller(sc: Scenario):
    cfg = sc.mpc_config()
    if sc.controller == "t-mpc":
        return TrackingMpc(cfg, sc.params)
    if sc.controller == "eo-mpc":
        return EnergyOptimalMpc(cfg, sc.params)
    return SwitchingMpc(cfg, sc.params, sc.switch_config())


def run_scenario(sc: Scenario) -> SimLog:
    """Simulate one point-to-point run under the scenario's controller.

    Each step reads full state, runs the surge controller and the pose
    autopilots, mixes the demands onto the thrusters and advances the plant.
    The run stops once x crosses ``x_f - stop_tolerance`` (checked before the
    step, so a zero-distance scenario terminates immediately).
    """
    controller = _make_controller(sc)
    autopilots = Autopilots(sc.params, sc.depth_gains, sc.pitch_gains,
                            sc.yaw_gains)
    state = VehicleState(nu=np.array([sc.u0, 0, 0, 0, 0, 0]),
                         eta=np.array([sc.x0, 0, 0, 0, 0, 0]))
    threshold = sc.x_f - sc.stop_tolerance
    max_steps = int(math.ceil(sc.max_sim_time / sc.dt))

    rec_t, rec_nu, rec_eta, rec_thr = [], [], [], []
    rec_T, rec_inv, rec_st, rec_cost = [], [], [], []
    reached = state.x >= threshold
    step = 0
    while not reached and step < max_steps:
        t = step * sc.dt
        decision: ControlDecision = controller.step(state.nu, state.eta)
        tau_Z, tau_M, tau_N = autopilots.step(state.eta, sc.dt)
        forces = mix(decision.T_total, tau_M, tau_N, tau_Z, sc.params,
                     per_thruster_limit=sc.per_thruster_limit)
        wrench = thruster_allocation(forces, sc.params)

        rec_t.append(t)
        rec_nu.append(state.nu.copy())
        rec_eta.append(state.eta.copy())
        rec_thr.append(forces.as_array())
        rec_T.append(decision.T_total)
        rec_inv.append(decision.solver_invoked)
        rec_st.append(decision.solve_time)
        rec_cost.append(decision.predicted_cost)

        state = integrate_step(state, wrench, sc.dt, sc.params)
        step += 1
        reached = state.x >= threshold

    t_travel = step * sc.dt
    thrusters = np.array(rec_thr).reshape(step, 4)
    ledger = trip_energy([ThrusterForces(*row) for row in thrusters], sc.dt,
                         sc.params)
    ledger.t_travel = t_travel
    log = SimLog(
        t=np.array(rec_t), nu=np.array(rec_nu).reshape(step, 6),
        eta=np.array(rec_eta).reshape(step, 6), thrusters=thrusters,
        T_total=np.array(rec_T), solver_invoked=np.array(rec_inv, dtype=bool),
        solve_time=np.array(rec_st), predicted_cost=np.array(rec_cost),
        ledger=ledger, reached=reached, t_travel=t_travel,
        final_state=state, scenario=sc)
    if not reached:
        raise MaxSimTimeExceeded(
            f"x = {state.x:.3f} m after {sc.max_sim_time:.1f} s "
            f"(target {sc.x_f:.3f} m)", log)
    return log


# Pose envelopes every closed-loop run must respect (positions [m],
# angles [rad]), alongside the total-thrust bound.
POSE_ENVELOPES = {"y": 0.01, "z": 0.005, "phi": 0.2, "theta": 0.01, "psi": 0.01}


def audit_constraints(log: SimLog) -> list[str]:
    """Check every logged step against the input bound and pose envelopes.

    Returns a list of violation descriptions (empty when the run is clean).
    """
    sc = log.scenario
    violations = []
    bad_T = np.abs(log.T_total) > sc.t_max + 1e-12
    if bad_T.any():
        k = int(np.argmax(bad_T))
        violations.append(f"|T_total| > {sc.t_max} at t={log.t[k]:.1f}s "
                          f"({log.T_total[k]:.3f} N)")
    for idx, (name, bound) in enumerate(POSE_ENVELOPES.items(), start=1):
        series = np.abs(log.eta[:, idx])
        if series.size and series.max() > bound:
            k = int(np.argmax(series))
            violations.append(f"|{name}| exceeds {bound} at t={log.t[k]:.1f}s "
                              f"({log.eta[k, idx]:.5f})")
    return violations


@dataclass
class ComparisonRow:
    controller: str
    travel_time: float
    energy: float
    loss_pct: float | None         # vs the collocation baseline; None for the baseline
    avg_solve_time: float | None
    total_solve_time: float | None
    ledger: EnergyLedger | None = None


@dataclass
class ComparisonReport:
    rows: list[ComparisonRow]
    logs: dict[str, SimLog]
    baseline: collocation.CollocationSolution


def compare_controllers(sc: Scenario) -> ComparisonReport:
    """Run the collocation baseline and all three controllers on one scenario."""
    problem = collocation.CollocationProblem(
        params=sc.params, x0=sc.x0, x_f=sc.x_f, u0=sc.u0,
        n=sc.oracle_segments, t_min=sc.t_min, t_max=sc.t_max)
    baseline = collocation.solve(problem)
    rows = [ComparisonRow("DC", baseline.t_travel, baseline.energy,
                          None, None, None)]
    logs: dict[str, SimLog] = {}
    for name in ("t-mpc", "eo-mpc", "rteo-mpc"):
        log = run_scenario(replace(sc, controller=name))
        logs[name] = log
        loss = 100.0 * (log.ledger.total - baseline.energy) / baseline.energy
        rows.append(ComparisonRow(name.upper(), log.t_travel, log.ledger.total,
                                  loss, log.avg_solve_time,
                                  log.total_solve_time, log.ledger))
    return ComparisonReport(rows=rows, logs=logs, baseline=baseline)


@dataclass
class HorizonPoint:
    horizon: int
    energy: float
    travel_time: float
    avg_solve_time: float          # averaged over the timing repeats
    max_solve_time: float


def sweep_horizon(sc: Scenario, horizons: list[int],
                  timing_repeats: int = 10) -> list[HorizonPoint]:
    """Energy and solve-time statistics of the energy-optimal controller as a
    function of the prediction horizon.

    The run itself is deterministic; solve times are not, so each horizon is
    re-run ``timing_repeats`` times and the timing statistics averaged.
    """
    if not horizons:
        raise ValueError("need at least one horizon")
    points = []
    for n in horizons:
        variant = replace(sc, controller="eo-mpc", horizon=n)
        log = run_scenario(variant)
        avg_times, max_times = [log.avg_solve_time], [float(log.solve_time.max())]
        for _ in range(max(0, timing_repeats - 1)):
            rerun = run_scenario(variant)
            avg_times.append(rerun.avg_solve_time)
            max_times.append(float(rerun.solve_time.max()))
        points.append(HorizonPoint(
            horizon=n, energy=log.ledger.total, travel_time=log.t_travel,
            avg_solve_time=float(np.mean(avg_times)),
            max_solve_time=float(np.mean(max_times))))
    return points


@dataclass
class SweepCell:
    x0: float
    u0: float
    controller: str
    energy: float | None
    travel_time: float | None
    oracle_energy: float
    gap: float | None              # [J] energy - oracle
    gap_pct: float | None
    error: str = ""


def sweep_initial_conditions(sc: Scenario, x0_values, u0_values,
                             controllers=("rteo-mpc", "t-mpc"),
                             oracle_segments: int = 150) -> list[SweepCell]:
    """Grid of closed-loop runs vs the re-solved collocation reference.

    Cell failures are isolated: a failed run is reported in its cell and the
    sweep continues.
    """
    cells = []
    for x0 in x0_values:
        for u0 in u0_values:
            distance = sc.x_f - x0
            oracle = collocation.reference_energy(
                distance, u0, sc.params, n=oracle_segments,
                t_min=sc.t_min, t_max=sc.t_max)
            for name in controllers:
                variant = replace(sc, controller=name, x0=x0, u0=u0)
                try:
                    log = run_scenario(variant)
                except Exception as exc:  # isolate per-cell failures
                    cells.append(SweepCell(x0, u0, name, None, None, oracle,
                                           None, None, error=str(exc)))
                    continue
                gap = log.ledger.total - oracle
                gap_pct = 100.0 * gap / oracle if oracle > 0 else 0.0
                cells.append(SweepCell(x0, u0, name, log.ledger.total,
                                       log.t_travel, oracle, gap, gap_pct))
    return cells
