import math

import numpy as np
import pytest

from auvmpc.dynamics import ThrusterForces, VehicleState, integrate_step, thruster_allocation
from auvmpc.surge import FrozenContext, SurgeState, surge_derivative, surge_rollout

U_STAR = 0.13865227898215307


class TestSurgeDerivative:
    def test_acceleration_from_rest(self, params):
        x_dot, u_dot = surge_derivative(SurgeState(0, 0), FrozenContext(),
                                        15.72, params)
        assert u_dot == pytest.approx(15.72 / 22.462, rel=1e-12)
        assert x_dot == 0.0

    def test_cruise_balance(self, params):
        T = params.X_uu * U_STAR ** 2
        x_dot, u_dot = surge_derivative(SurgeState(0, U_STAR), FrozenContext(),
                                        T, params)
        assert u_dot == pytest.approx(0.0, abs=1e-15)
        assert x_dot == pytest.approx(U_STAR)

    def test_level_attitude_kills_gravity_term(self, params):
        _, u_dot_level = surge_derivative(SurgeState(0, 0.1),
                                          FrozenContext(theta=0.0), 1.0, params)
        _, u_dot_pitched = surge_derivative(SurgeState(0, 0.1),
                                            FrozenContext(theta=0.01), 1.0, params)
        expected_shift = ((params.B - params.W) * math.sin(0.01)
                          / (params.m - params.X_du))
        assert u_dot_pitched - u_dot_level == pytest.approx(expected_shift, rel=1e-9)

    def test_frozen_coupling_terms(self, params):
        ctx = FrozenContext(v=0.02, w=-0.03, p=0.01, q=0.04, r=-0.05)
        _, u_dot = surge_derivative(SurgeState(0, 0), ctx, 0.0, params)
        coupling = params.m * (ctx.w * ctx.q - ctx.v * ctx.r
                               + params.z_g * ctx.p * ctx.r)
        assert u_dot == pytest.approx(-coupling / (params.m - params.X_du))

    def test_x_rate_uses_frozen_attitude(self, params):
        ctx = FrozenContext(v=0.1, w=0.05, phi=0.2, theta=0.1, psi=0.3)
        x_dot, _ = surge_derivative(SurgeState(0, 0.5), ctx, 0.0, params)
        cphi, sphi = math.cos(0.2), math.sin(0.2)
        cth, sth = math.cos(0.1), math.sin(0.1)
        cpsi, spsi = math.cos(0.3), math.sin(0.3)
        expected = (cpsi * cth * 0.5
                    + (cpsi * sth * sphi - spsi * cphi) * 0.1
                    + (spsi * sphi + cpsi * sth * cphi) * 0.05)
        assert x_dot == pytest.approx(expected, rel=1e-12)


class TestSurgeRollout:
    def test_zero_input_from_rest_is_stationary(self, params):
        states = surge_rollout(SurgeState(1.0, 0.0), FrozenContext(),
                               np.zeros(15), 0.1, params)
        assert len(states) == 16
        assert all(s.x == 1.0 and s.u == 0.0 for s in states)

    def test_cruise_fixed_point(self, params):
        T = params.X_uu * U_STAR ** 2
        states = surge_rollout(SurgeState(0, U_STAR), FrozenContext(),
                               np.full(15, T), 0.1, params)
        assert all(abs(s.u - U_STAR) < 1e-6 for s in states)

    def test_clamped_at_zero_speed(self, params):
        states = surge_rollout(SurgeState(0, 0.05), FrozenContext(),
                               np.full(20, -15.72), 0.1, params)
        assert all(s.u >= 0.0 for s in states)
        assert states[-1].u == 0.0

    def test_coast_against_closed_form(self, params):
        # zero-thrust coast under quadratic drag has the exact solution
        # u(t) = u0 / (1 + k u0 t), x(t) = ln(1 + k u0 t) / k
        k = params.X_uu / (params.m - params.X_du)
        u0 = 0.3
        horizon_t = 5.0

        def rollout_err(dt: float) -> float:
            steps = int(round(horizon_t / dt))
            states = surge_rollout(SurgeState(0, u0), FrozenContext(),
                                   np.zeros(steps), dt, params)
            x_exact = math.log(1 + k * u0 * horizon_t) / k
            return abs(states[-1].x - x_exact)

        e_coarse, e_fine = rollout_err(0.1), rollout_err(0.05)
        assert e_coarse < 0.01
        assert 1.6 < e_coarse / e_fine < 2.4  # first-order stepping

    def test_distance_is_step_sum_of_velocities(self, params):
        rng = np.random.default_rng(37)
        inputs = rng.uniform(-1.0, 3.0, 25)
        states = surge_rollout(SurgeState(0.5, 0.1), FrozenContext(), inputs,
                               0.1, params)
        riemann = 0.5 + 0.1 * sum(s.u for s in states[:-1])
        assert states[-1].x == pytest.approx(riemann, rel=1e-12)

    def test_monotone_in_inputs(self, params):
        rng = np.random.default_rng(31)
        for _ in range(30):
            base = rng.uniform(-2.0, 5.0, 15)
            bump = base + rng.uniform(0.0, 3.0, 15)
            s_lo = surge_rollout(SurgeState(0, 0.1), FrozenContext(), base,
                                 0.1, params)
            s_hi = surge_rollout(SurgeState(0, 0.1), FrozenContext(), bump,
                                 0.1, params)
            assert all(hi.u >= lo.u - 1e-15
                       for lo, hi in zip(s_lo, s_hi))

    def test_rejects_bad_dt(self, params):
        with pytest.raises(ValueError):
            surge_rollout(SurgeState(), FrozenContext(), [1.0], 0.0, params)

    @staticmethod
    def _plant_trace(params, u0, inputs):
        state = VehicleState(nu=np.array([u0, 0, 0, 0, 0, 0]))
        hover = -params.net_buoyancy / 2.0
        xs, us = [0.0], [u0]
        for T in inputs:
            forces = ThrusterForces(T / 2, T / 2, hover, hover)
            state = integrate_step(state, thruster_allocation(forces, params),
                                   0.1, params)
            xs.append(state.eta[0])
            us.append(state.nu[0])
        return xs, us

    def test_matches_full_plant_in_cruise(self, params):
        # zero frozen context, level attitude: the reduced model must track the
        # 6-DOF plant's (x, u) trace within 1% over an MPC horizon
        cruise = params.X_uu * U_STAR ** 2
        inputs = cruise * np.array([1.0, 1.1, 1.2, 1.1, 1.0, 0.9, 0.8, 0.9,
                                    1.0, 1.05, 1.0, 0.95, 1.0, 1.0, 1.0])
        pred = surge_rollout(SurgeState(0, U_STAR), FrozenContext(), inputs,
                             0.1, params)
        xs, us = self._plant_trace(params, U_STAR, inputs)
        for k in range(1, len(pred)):
            assert pred[k].u == pytest.approx(us[k], rel=0.01)
            assert pred[k].x == pytest.approx(xs[k], rel=0.01)

    def test_matches_full_plant_speed_from_rest(self, params):
        inputs = np.array([2.5, 2.2, 2.0, 1.8, 1.6, 1.5, 1.4, 1.3, 1.25, 1.2,
                           1.15, 1.1, 1.08, 1.05, 1.02])
        pred = surge_rollout(SurgeState(0, 0), FrozenContext(), inputs, 0.1,
                             params)
        xs, us = self._plant_trace(params, 0.0, inputs)
        for k in range(1, len(pred)):
            assert pred[k].u == pytest.approx(us[k], rel=0.01)
        # position carries the explicit first-order half-step bias bound:
        # sum of 0.5 * dt * (u_{k+1} - u_k) plus a same-order margin
        bias = 0.5 * 0.1 * (us[-1] - us[0])
        assert abs(pred[-1].x - xs[-1]) <= 1.5 * bias
