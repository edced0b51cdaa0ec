import numpy as np
import pytest

from auvmpc.collocation import (CollocationError, CollocationProblem,
                                CollocationSolution, reference_energy, solve)
from auvmpc.energy import energy_per_distance, static_optimal_velocity

U_STAR = 0.13865227898215307


@pytest.fixture(scope="module")
def ten_meter_solution(params) -> CollocationSolution:
    return solve(CollocationProblem(params=params, n=120))


class TestSolve:
    def test_zero_distance_is_trivial(self, params):
        sol = solve(CollocationProblem(params=params, x0=3.0, x_f=3.0, u0=0.2))
        assert sol.energy == 0.0
        assert sol.t_travel == 0.0
        assert sol.converged

    def test_ten_meter_energy_and_time_brackets(self, ten_meter_solution):
        assert 67.0 <= ten_meter_solution.energy <= 71.0
        assert 70.0 <= ten_meter_solution.t_travel <= 80.0

    def test_defects_and_stationarity(self, ten_meter_solution):
        assert ten_meter_solution.defect_violation <= 1e-6
        assert ten_meter_solution.kkt_residual <= 1e-6
        assert ten_meter_solution.converged

    def test_boundary_conditions_pinned(self, ten_meter_solution, params):
        sol = ten_meter_solution
        assert sol.x[0] == pytest.approx(0.0, abs=1e-6)
        assert sol.x[-1] == pytest.approx(10.0, abs=1e-6)
        assert sol.u[0] == pytest.approx(0.0, abs=1e-6)

    def test_thrust_within_bounds(self, ten_meter_solution):
        assert np.all(ten_meter_solution.T_total <= 15.72 + 1e-9)
        assert np.all(ten_meter_solution.T_total >= -15.72 - 1e-9)

    def test_speed_profile_shape(self, ten_meter_solution):
        # accelerate, cruise near the static optimum, decelerate
        u = ten_meter_solution.u
        assert u[0] == pytest.approx(0.0, abs=1e-6)
        mid = u[len(u) // 3: 2 * len(u) // 3]
        assert np.all(np.abs(mid - U_STAR) < 0.03 * U_STAR)
        assert u[-1] < U_STAR

    def test_long_transfer_consistent_with_static_optimum(self, params):
        sol = solve(CollocationProblem(params=params, x_f=50.0, u0=U_STAR,
                                       n=200))
        interior = np.abs(sol.u - U_STAR) <= 0.02 * U_STAR
        assert np.mean(interior) >= 0.90
        static = 50.0 * energy_per_distance(U_STAR, params)
        assert sol.energy == pytest.approx(static, rel=0.01)

    def test_rejects_backwards_transfer(self, params):
        with pytest.raises(ValueError):
            CollocationProblem(params=params, x0=5.0, x_f=1.0)

    def test_two_defect_rows_per_segment(self, params):
        from auvmpc.collocation import _Transcription

        problem = CollocationProblem(params=params, n=17)
        tr = _Transcription(problem)
        z = tr.initial_guess()
        assert tr.defects(z).shape == (2 * 17,)
        assert tr.dim == 3 * 18 + 1

    def test_nonconvergence_raises_with_diagnostics(self, params):
        # speed ceiling far below what the boxed travel time allows: infeasible
        problem = CollocationProblem(params=params, x_f=10.0, n=25, u_max=0.01)
        with pytest.raises(CollocationError, match="defect"):
            solve(problem, coarse_n=0, max_iterations=60)

    def test_csv_rows(self, ten_meter_solution):
        text = ten_meter_solution.csv_rows()
        lines = text.strip().splitlines()
        assert lines[0] == "k,t,x,u,T_total"
        assert len(lines) == len(ten_meter_solution.t) + 1


class TestReferenceEnergy:
    def test_zero_distance(self, params):
        assert reference_energy(0.0, 0.3, params) == 0.0

    def test_rejects_negative_arguments(self, params):
        with pytest.raises(ValueError):
            reference_energy(-1.0, 0.0, params)
        with pytest.raises(ValueError):
            reference_energy(1.0, -0.1, params)

    def test_near_cruise_matches_steady_state_estimate(self, params):
        # the cost-to-go model d * EPD(u*) should be a tight estimate when
        # starting at the optimum speed
        ref = reference_energy(10.0, U_STAR, params, n=100)
        estimate = 10.0 * energy_per_distance(U_STAR, params)
        assert abs(estimate - ref) <= 1.0

    def test_fast_start_beats_steady_state_estimate(self, params):
        # starting above the optimum speed, the optimizer exploits the stored
        # kinetic energy, so the steady-state estimate overshoots
        ref = reference_energy(10.0, 0.4, params, n=100)
        estimate = 10.0 * energy_per_distance(0.4, params)
        assert estimate - ref > 10.0

    def test_monotone_in_distance(self, params):
        energies = [reference_energy(d, 0.1, params, n=80)
                    for d in (2.0, 5.0, 8.0, 10.0)]
        assert np.all(np.diff(energies) > 0)


class TestTranscriptionConvergence:
    def test_halving_changes_energy_under_tenth_percent(self, params):
        e150 = solve(CollocationProblem(params=params, n=150)).energy
        e300 = solve(CollocationProblem(params=params, n=300)).energy
        assert abs(e300 - e150) / e150 < 1e-3
