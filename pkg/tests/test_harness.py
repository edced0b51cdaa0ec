from dataclasses import replace

import numpy as np
import pytest

from auvmpc.dynamics import ThrusterForces
from auvmpc.energy import trip_energy
from auvmpc.harness import (MaxSimTimeExceeded, audit_constraints,
                            compare_controllers, run_scenario, sweep_horizon,
                            sweep_initial_conditions)
from auvmpc.reports import (comparison_table, decisions_csv, horizon_csv,
                            ic_sweep_csv, summary_csv, summary_row, trace_csv)
from auvmpc.scenario import Scenario

SHORT = Scenario(x_f=1.0, controller="eo-mpc", max_sim_time=60.0)


@pytest.fixture(scope="module")
def short_log():
    return run_scenario(SHORT)


class TestRunScenario:
    def test_zero_distance_terminates_immediately(self):
        log = run_scenario(Scenario(x0=4.0, x_f=4.0))
        assert log.steps == 0
        assert log.reached
        assert log.t_travel == 0.0
        assert log.ledger.total == 0.0

    def test_short_run_reaches_destination(self, short_log):
        assert short_log.reached
        assert short_log.final_state.x >= 1.0 - SHORT.stop_tolerance
        assert short_log.t_travel == short_log.steps * SHORT.dt

    def test_records_every_step(self, short_log):
        dt = np.diff(short_log.t)
        assert np.allclose(dt, SHORT.dt)
        assert short_log.nu.shape == (short_log.steps, 6)
        assert short_log.thrusters.shape == (short_log.steps, 4)

    def test_ledger_matches_logged_inputs(self, short_log):
        recomputed = trip_energy(short_log.thruster_forces(), SHORT.dt,
                                 SHORT.params)
        assert short_log.ledger.total == pytest.approx(recomputed.total,
                                                       rel=1e-9)

    def test_constraint_audit_clean(self, short_log):
        assert audit_constraints(short_log) == []

    def test_deterministic_replay(self, short_log):
        again = run_scenario(SHORT)
        assert np.array_equal(again.nu, short_log.nu)
        assert np.array_equal(again.eta, short_log.eta)
        assert np.array_equal(again.thrusters, short_log.thrusters)
        assert np.array_equal(again.T_total, short_log.T_total)
        assert np.array_equal(again.solver_invoked, short_log.solver_invoked)
        assert again.t_travel == short_log.t_travel

    def test_max_time_exceeded_raises_with_partial_log(self):
        sc = replace(SHORT, x_f=10.0, max_sim_time=2.0)
        with pytest.raises(MaxSimTimeExceeded) as err:
            run_scenario(sc)
        assert err.value.log.steps == 20
        assert not err.value.log.reached

    def test_full_scenario_matches_published_figures(self):
        # 10 m from rest with the switching controller: about 69.8 J / 74.7 s
        log = run_scenario(Scenario())
        assert log.ledger.total == pytest.approx(69.83, rel=0.02)
        assert log.t_travel == pytest.approx(74.70, rel=0.02)
        assert float(np.mean(log.solver_invoked)) < 0.5


class TestCompare:
    def test_small_comparison(self):
        sc = Scenario(x_f=2.0, oracle_segments=60)
        report = compare_controllers(sc)
        names = [r.controller for r in report.rows]
        assert names == ["DC", "T-MPC", "EO-MPC", "RTEO-MPC"]
        base = report.rows[0]
        assert base.loss_pct is None
        for row in report.rows[1:]:
            assert row.energy >= base.energy * 0.995  # baseline is a lower bound
            assert row.loss_pct == pytest.approx(
                100 * (row.energy - base.energy) / base.energy)
        assert set(report.logs) == {"t-mpc", "eo-mpc", "rteo-mpc"}


class TestSweeps:
    def test_horizon_sweep_small(self):
        pts = sweep_horizon(Scenario(x_f=1.0), [3, 6], timing_repeats=1)
        assert [p.horizon for p in pts] == [3, 6]
        for p in pts:
            assert p.energy > 0
            assert p.max_solve_time >= p.avg_solve_time > 0

    def test_horizon_sweep_rejects_empty(self):
        with pytest.raises(ValueError):
            sweep_horizon(Scenario(), [])

    def test_ic_sweep_grid(self):
        cells = sweep_initial_conditions(
            Scenario(x_f=2.0), [0.0, 2.0], [0.0, 0.2],
            controllers=("rteo-mpc",), oracle_segments=40)
        assert len(cells) == 4
        finished = [c for c in cells if c.error == ""]
        assert len(finished) == 4
        zero_distance = [c for c in cells if c.x0 == 2.0]
        for c in zero_distance:
            assert c.oracle_energy == 0.0
            assert c.energy == 0.0
            assert c.gap_pct == 0.0
        moving = [c for c in cells if c.x0 == 0.0]
        for c in moving:
            assert c.gap is not None and c.gap > -0.05 * c.oracle_energy


class TestReports:
    def test_trace_csv_layout(self, short_log):
        lines = trace_csv(short_log).strip().splitlines()
        assert lines[0].split(",") == [
            "t", "x", "y", "z", "phi", "theta", "psi", "u", "v", "w", "p",
            "q", "r", "T1", "T2", "T3", "T4", "T_total", "solver_invoked",
            "solve_time_s"]
        assert len(lines) == short_log.steps + 1
        first = lines[1].split(",")
        assert float(first[0]) == 0.0
        assert first[18] in ("0", "1")

    def test_decisions_csv_layout(self, short_log):
        lines = decisions_csv(short_log).strip().splitlines()
        assert lines[0] == "t,T_total,solver_invoked,solve_time_s,predicted_cost_J"
        assert len(lines) == short_log.steps + 1

    def test_summary_csv_layout(self, short_log):
        text = summary_csv([summary_row("eo-mpc", short_log)])
        lines = text.strip().splitlines()
        assert lines[0].startswith("controller,surge_J,heave_J")
        row = lines[1].split(",")
        assert row[0] == "eo-mpc"
        assert float(row[5]) == pytest.approx(short_log.ledger.total)

    def test_comparison_table_text(self):
        report = compare_controllers(Scenario(x_f=2.0, oracle_segments=60))
        text = comparison_table(report)
        assert "DC" in text and "RTEO-MPC" in text
        assert "Loss (%)" in text

    def test_sweep_csv_headers(self):
        pts = sweep_horizon(Scenario(x_f=1.0), [3], timing_repeats=1)
        assert horizon_csv(pts).startswith("horizon,energy_J")
        cells = sweep_initial_conditions(Scenario(x_f=1.0), [0.0], [0.0],
                                         controllers=("rteo-mpc",),
                                         oracle_segments=30)
        assert ic_sweep_csv(cells).startswith("x0,u0,controller")
