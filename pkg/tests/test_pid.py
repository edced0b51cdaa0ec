import numpy as np
import pytest

from auvmpc.dynamics import ThrusterForces, thruster_allocation
from auvmpc.pid import Autopilots, Pid, PidGains, mix


class TestPid:
    def test_zero_error_zero_output(self):
        pid = Pid(PidGains(k_p=2.0, k_i=1.0, k_d=0.5))
        assert pid.update(0.0, 0.0, 0.1) == 0.0
        assert pid.update(0.0, 0.0, 0.1) == 0.0

    def test_first_sample_step_error(self):
        pid = Pid(PidGains(k_p=2.0, k_i=1.0, k_d=0.5))
        out = pid.update(1.0, 0.0, 0.1)
        # proportional plus one integration step; no derivative kick on the
        # first sample (derivative acts on the measurement)
        assert out == pytest.approx(2.0 * 1.0 + 1.0 * 0.1)

    def test_derivative_on_measurement(self):
        pid = Pid(PidGains(k_p=0.0, k_i=0.0, k_d=2.0))
        pid.update(0.0, 1.0, 0.1)
        out = pid.update(0.0, 1.5, 0.1)
        assert out == pytest.approx(-2.0 * 0.5 / 0.1)

    def test_output_saturation(self):
        pid = Pid(PidGains(k_p=100.0, output_limit=3.0))
        assert pid.update(10.0, 0.0, 0.1) == 3.0
        assert pid.update(-10.0, 0.0, 0.1) == -3.0

    def test_integral_clamp(self):
        pid = Pid(PidGains(k_p=0.0, k_i=1.0, integral_limit=0.5))
        for _ in range(100):
            pid.update(10.0, 0.0, 0.1)
        assert pid.integral == 0.5
        assert pid.update(10.0, 0.0, 0.1) == pytest.approx(0.5)

    def test_reset(self):
        pid = Pid(PidGains(k_p=1.0, k_i=1.0, k_d=1.0))
        pid.update(1.0, 2.0, 0.1)
        pid.reset()
        assert pid.integral == 0.0
        assert pid.update(0.0, 0.0, 0.1) == 0.0

    def test_rejects_negative_gains(self):
        with pytest.raises(ValueError):
            PidGains(k_p=-1.0)

    def test_rejects_bad_dt(self):
        with pytest.raises(ValueError):
            Pid(PidGains(k_p=1.0)).update(1.0, 0.0, 0.0)


class TestMix:
    def test_pure_surge_demand(self, params):
        forces = mix(2.0, 0.0, 0.0, 0.0, params)
        assert forces == ThrusterForces(1.0, 1.0, 0.0, 0.0)

    def test_hover_demand_split(self, params):
        forces = mix(0.0, 0.0, 0.0, -1.47, params)
        assert forces.T3 == pytest.approx(-0.735)
        assert forces.T4 == pytest.approx(-0.735)

    def test_right_inverse_of_allocation(self, params):
        rng = np.random.default_rng(41)
        for _ in range(100):
            T_total = rng.uniform(-14, 14)
            tau_Z = rng.uniform(-14, 14)
            # moment demands inside the remaining pair headroom
            head_h = (7.86 - abs(T_total) / 2) * 2 * params.l_2
            head_v = (7.86 - abs(tau_Z) / 2) * 2 * params.l_1
            tau_N = rng.uniform(-head_h, head_h)
            tau_M = rng.uniform(-head_v, head_v)
            forces = mix(T_total, tau_M, tau_N, tau_Z, params)
            tau = thruster_allocation(forces, params)
            assert tau.X == pytest.approx(T_total, abs=1e-12)
            assert tau.Z == pytest.approx(tau_Z, abs=1e-12)
            assert tau.M == pytest.approx(tau_M, abs=1e-12)
            assert tau.N == pytest.approx(tau_N, abs=1e-12)

    def test_left_inverse_of_allocation(self, params):
        rng = np.random.default_rng(43)
        for _ in range(100):
            T = ThrusterForces(*rng.uniform(-7.8, 7.8, 4))
            tau = thruster_allocation(T, params)
            back = mix(tau.X, tau.M, tau.N, tau.Z, params)
            assert back.as_array() == pytest.approx(T.as_array(), abs=1e-12)

    def test_saturation_prioritizes_forces(self, params):
        forces = mix(15.72, 0.0, 5.0, 0.0, params)
        # full surge demand leaves no yaw headroom
        assert forces.T1 == pytest.approx(7.86)
        assert forces.T2 == pytest.approx(7.86)

    def test_per_thruster_limit_respected(self, params):
        rng = np.random.default_rng(47)
        for _ in range(200):
            demands = rng.uniform(-40, 40, 4)
            forces = mix(demands[0], demands[1], demands[2], demands[3], params)
            assert np.all(np.abs(forces.as_array()) <= 7.86 + 1e-12)


class TestAutopilots:
    def test_trim_feedforward_at_zero_pose(self, params):
        pilots = Autopilots(params)
        tau_Z, tau_M, tau_N = pilots.step(np.zeros(6), 0.1)
        assert tau_Z == pytest.approx(-params.net_buoyancy)
        assert tau_M == 0.0
        assert tau_N == 0.0

    def test_depth_loop_pushes_back(self, params):
        pilots = Autopilots(params)
        eta = np.zeros(6)
        eta[2] = 0.002  # drifted up
        tau_Z, _, _ = pilots.step(eta, 0.1)
        assert tau_Z < -params.net_buoyancy  # extra downward force
