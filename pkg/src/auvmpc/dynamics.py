"""6-DOF rigid-body plant model: thruster allocation, power, drag, equations of
motion and a fixed-step 4th-order integrator.

Frames: body axes x-forward / z-up, earth-fixed axes with z up, ZYX Euler
angles (roll phi, pitch theta, yaw psi).  With this convention the positively
buoyant vehicle accelerates toward +z when unactuated and hovers under a
vertical thrust of ``-(B - W)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .params import VehicleParams

PITCH_SINGULARITY_TOL = 1e-6  # [rad] guard distance from theta = +/- pi/2


class TransformSingularError(ValueError):
    """Raised when the Euler kinematic transform degenerates (|theta| -> pi/2)."""


def wrap_angle(a: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    w = math.remainder(a, math.tau)
    if w <= -math.pi:
        w += math.tau
    return w


@dataclass
class VehicleState:
    """Body-frame velocities nu = (u, v, w, p, q, r) and earth-frame pose
    eta = (x, y, z, phi, theta, psi)."""

    nu: np.ndarray = field(default_factory=lambda: np.zeros(6))
    eta: np.ndarray = field(default_factory=lambda: np.zeros(6))

    def __post_init__(self) -> None:
        self.nu = np.asarray(self.nu, dtype=float).copy()
        self.eta = np.asarray(self.eta, dtype=float).copy()
        if self.nu.shape != (6,) or self.eta.shape != (6,):
            raise ValueError("nu and eta must be 6-vectors")
        for i in (3, 4, 5):
            self.eta[i] = wrap_angle(self.eta[i])

    @property
    def u(self) -> float:
        return float(self.nu[0])

    @property
    def x(self) -> float:
        return float(self.eta[0])

    def copy(self) -> "VehicleState":
        return VehicleState(self.nu.copy(), self.eta.copy())


@dataclass(frozen=True)
class ThrusterForces:
    """Individual thruster forces [N]: T1/T2 horizontal pair, T3/T4 vertical pair."""

    T1: float = 0.0
    T2: float = 0.0
    T3: float = 0.0
    T4: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.T1, self.T2, self.T3, self.T4])


@dataclass(frozen=True)
class GeneralizedForce:
    """Body-frame control wrench (forces [N], moments [N m])."""

    X: float = 0.0
    Y: float = 0.0
    Z: float = 0.0
    K: float = 0.0
    M: float = 0.0
    N: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.X, self.Y, self.Z, self.K, self.M, self.N])


def thruster_allocation(T: ThrusterForces, params: VehicleParams) -> GeneralizedForce:
    """Map the four thruster forces to a body wrench.

    The horizontal pair produces surge force and yaw moment (arm ``l_2``), the
    vertical pair heave force and pitch moment (arm ``l_1``); sway and roll are
    unactuated.
    """
    return GeneralizedForce(
        X=T.T1 + T.T2,
        Z=T.T3 + T.T4,
        M=params.l_1 * (T.T3 - T.T4),
        N=params.l_2 * (T.T1 - T.T2),
    )


def thruster_power(T: float, params: VehicleParams) -> float:
    """Propeller shaft power [W] for a single thruster force T [N].

    Momentum-theory relation ``C_p * |T|^1.5``; reverse thrust consumes the
    same power as forward thrust of equal magnitude.
    """
    return params.C_p * abs(T) ** 1.5


def damping_force(nu: np.ndarray, params: VehicleParams) -> np.ndarray:
    """Quadratic hydrodynamic drag wrench opposing the body velocities.

    Componentwise ``-coef * |v| * v`` (diagonal damping, no cross terms).
    """
    nu = np.asarray(nu, dtype=float)
    coefs = np.array([params.X_uu, params.Y_vv, params.Z_ww,
                      params.K_pp, params.M_qq, params.N_rr])
    return -coefs * np.abs(nu) * nu


def mass_matrix(params: VehicleParams) -> np.ndarray:
    """Total inertia matrix: rigid body (CG at (0, 0, -z_g)) plus diagonal added mass."""
    m, zg = params.m, params.z_g
    M = np.diag([
        m - params.X_du,
        m - params.Y_dv,
        m - params.Z_dw,
        params.I_xx - params.K_dp,
        params.I_yy - params.M_dq,
        params.I_zz - params.N_dr,
    ])
    # CG offset couples surge/pitch and sway/roll (z-up body axes, CG below origin)
    M[0, 4] = M[4, 0] = -m * zg
    M[1, 3] = M[3, 1] = m * zg
    return M


def coriolis_force(nu: np.ndarray, params: VehicleParams) -> np.ndarray:
    """Rigid-body plus added-mass Coriolis/centripetal wrench C(nu) @ nu.

    Both contributions use the skew-symmetric parametrization, so the result
    is orthogonal to nu (does no work) for every velocity.
    """
    u, v, w, p, q, r = np.asarray(nu, dtype=float)
    m = params.m
    rz = -params.z_g  # CG position along body z (below origin)
    Ixx, Iyy, Izz = params.I_xx, params.I_yy, params.I_zz

    C = np.zeros((6, 6))
    C[0, 3] = m * rz * r
    C[0, 4] = m * w
    C[0, 5] = -m * v
    C[1, 3] = -m * w
    C[1, 4] = m * rz * r
    C[1, 5] = m * u
    C[2, 3] = -m * (rz * p - v)
    C[2, 4] = -m * (rz * q + u)
    C[3, 4] = Izz * r
    C[3, 5] = -Iyy * q
    C[4, 5] = Ixx * p

    # added-mass contribution (diagonal M_a)
    C[0, 4] += -params.Z_dw * w
    C[0, 5] += params.Y_dv * v
    C[1, 3] += params.Z_dw * w
    C[1, 5] += -params.X_du * u
    C[2, 3] += -params.Y_dv * v
    C[2, 4] += params.X_du * u
    C[3, 4] += -params.N_dr * r
    C[3, 5] += params.M_dq * q
    C[4, 5] += -params.K_dp * p

    C -= C.T  # lower triangle by skew symmetry (diagonals are zero)
    return C @ np.array([u, v, w, p, q, r])


def restoring_force(eta: np.ndarray, params: VehicleParams) -> np.ndarray:
    """Hydrostatic wrench g(eta) (appears on the left side of the EOM).

    Buoyancy acts at the body origin, weight at the CG (0, 0, -z_g); with z up
    the net force ``B - W`` points along +z at level attitude.
    """
    phi, theta = float(eta[3]), float(eta[4])
    sphi, cphi = math.sin(phi), math.cos(phi)
    sth, cth = math.sin(theta), math.cos(theta)
    net = params.net_buoyancy
    zgW = params.z_g * params.W
    return np.array([
        net * sth,
        -net * cth * sphi,
        -net * cth * cphi,
        zgW * cth * sphi,
        zgW * sth,
        0.0,
    ])


def rotation_matrix(phi: float, theta: float, psi: float) -> np.ndarray:
    """Body-to-earth rotation, ZYX Euler angles."""
    cphi, sphi = math.cos(phi), math.sin(phi)
    cth, sth = math.cos(theta), math.sin(theta)
    cpsi, spsi = math.cos(psi), math.sin(psi)
    return np.array([
        [cpsi * cth, cpsi * sth * sphi - spsi * cphi, spsi * sphi + cpsi * sth * cphi],
        [spsi * cth, cpsi * cphi + spsi * sth * sphi, spsi * sth * cphi - cpsi * sphi],
        [-sth, cth * sphi, cth * cphi],
    ])


def kinematic_transform(eta: np.ndarray) -> np.ndarray:
    """6x6 transform J(eta) mapping body velocities to earth-frame pose rates.

    Raises TransformSingularError when pitch is within the singularity guard of
    +/- pi/2.
    """
    phi, theta, psi = float(eta[3]), float(eta[4]), float(eta[5])
    if abs(theta) >= math.pi / 2 - PITCH_SINGULARITY_TOL:
        raise TransformSingularError(f"pitch {theta:.6f} rad too close to +/- pi/2")
    cphi, sphi = math.cos(phi), math.sin(phi)
    cth, sth = math.cos(theta), math.sin(theta)
    J = np.zeros((6, 6))
    J[:3, :3] = rotation_matrix(phi, theta, psi)
    J[3:, 3:] = np.array([
        [1.0, sphi * sth / cth, cphi * sth / cth],
        [0.0, cphi, -sphi],
        [0.0, sphi / cth, cphi / cth],
    ])
    return J


def state_derivative(
    state: VehicleState, tau_c: GeneralizedForce, params: VehicleParams
) -> tuple[np.ndarray, np.ndarray]:
    """Continuous-time dynamics: returns (nu_dot, eta_dot).

    nu_dot = M^-1 (tau_c + drag(nu) - C(nu) nu - g(eta)), eta_dot = J(eta) nu.
    """
    J = kinematic_transform(state.eta)
    force = (
        tau_c.as_array()
        + damping_force(state.nu, params)
        - coriolis_force(state.nu, params)
        - restoring_force(state.eta, params)
    )
    nu_dot = np.linalg.solve(mass_matrix(params), force)
    eta_dot = J @ state.nu
    return nu_dot, eta_dot


def integrate_step(
    state: VehicleState, tau_c: GeneralizedForce, dt: float, params: VehicleParams
) -> VehicleState:
    """Advance the plant one step of length dt under a held wrench (classical RK4)."""
    if dt <= 0:
        raise ValueError("dt must be positive")

    def f(nu: np.ndarray, eta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return state_derivative(VehicleState(nu, eta), tau_c, params)

    nu0, eta0 = state.nu, state.eta
    k1n, k1e = f(nu0, eta0)
    k2n, k2e = f(nu0 + 0.5 * dt * k1n, eta0 + 0.5 * dt * k1e)
    k3n, k3e = f(nu0 + 0.5 * dt * k2n, eta0 + 0.5 * dt * k2e)
    k4n, k4e = f(nu0 + dt * k3n, eta0 + dt * k3e)
    nu = nu0 + dt / 6.0 * (k1n + 2 * k2n + 2 * k3n + k4n)
    eta = eta0 + dt / 6.0 * (k1e + 2 * k2e + 2 * k3e + k4e)
    return VehicleState(nu, eta)  # constructor re-wraps the angles
