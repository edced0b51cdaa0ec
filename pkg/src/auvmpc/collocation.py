"""Trajectory-optimization baseline: minimum-energy surge trajectories by
direct collocation with trapezoidal transcription and free final time.

The decision vector stacks the speed, position and thrust samples on a uniform
grid plus the free step length ``h = t_travel / n``, which appears in the
defect constraints and the quadrature.  Solutions serve as the energy lower
bound the closed-loop controllers are compared against.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.optimize import Bounds, NonlinearConstraint, minimize

from .energy import heave_hover_power, static_optimal_velocity
from .params import VehicleParams

DEFECT_TOL = 1e-6


class CollocationError(RuntimeError):
    """Solve failed to produce a feasible stationary point."""


@dataclass(frozen=True)
class CollocationProblem:
    params: VehicleParams
    x0: float = 0.0
    x_f: float = 10.0
    u0: float = 0.0
    n: int = 300                  # segments
    t_min: float = -15.72         # [N] total-thrust bounds
    t_max: float = 15.72
    u_max: float = 1.0            # [m/s] speed ceiling (never active at optimum)

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError("need at least two segments")
        if self.x_f < self.x0:
            raise ValueError("destination must not be behind the start")
        if self.u0 < 0:
            raise ValueError("initial speed must be nonnegative")

    @property
    def distance(self) -> float:
        return self.x_f - self.x0


@dataclass
class CollocationSolution:
    t: np.ndarray                 # [s] grid times
    x: np.ndarray                 # [m]
    u: np.ndarray                 # [m/s]
    T_total: np.ndarray           # [N]
    t_travel: float               # [s]
    energy: float                 # [J]
    defect_violation: float
    kkt_residual: float
    converged: bool
    message: str = ""

    def csv_rows(self) -> str:
        lines = ["k,t,x,u,T_total"]
        for k in range(len(self.t)):
            lines.append(f"{k},{self.t[k]:.6f},{self.x[k]:.9f},"
                         f"{self.u[k]:.9f},{self.T_total[k]:.9f}")
        return "\n".join(lines) + "\n"


def _trivial_solution(problem: CollocationProblem) -> CollocationSolution:
    n = problem.n
    zeros = np.zeros(n + 1)
    return CollocationSolution(
        t=zeros.copy(), x=np.full(n + 1, problem.x0),
        u=np.full(n + 1, problem.u0), T_total=zeros.copy(), t_travel=0.0,
        energy=0.0, defect_violation=0.0, kkt_residual=0.0, converged=True,
        message="degenerate zero-distance problem")


class _Transcription:
    """Objective, defects and their sparse derivatives on the stacked vector
    z = [u_0..u_n, x_0..x_n, T_0..T_n, h]."""

    def __init__(self, problem: CollocationProblem):
        self.pb = problem
        p = problem.params
        self.n = problem.n
        self.m_eff = p.m - p.X_du
        self.x_uu = p.X_uu
        self.cp = p.C_p
        self.p_pb = heave_hover_power(p)
        self.u_star = static_optimal_velocity(p)
        n = self.n
        self.iu = slice(0, n + 1)
        self.ix = slice(n + 1, 2 * (n + 1))
        self.iT = slice(2 * (n + 1), 3 * (n + 1))
        self.ih = 3 * (n + 1)
        self.dim = 3 * (n + 1) + 1
        # trapezoid weights: 1/2 at the ends
        self.w = np.ones(n + 1)
        self.w[0] = self.w[-1] = 0.5

    def split(self, z: np.ndarray):
        return z[self.iu], z[self.ix], z[self.iT], float(z[self.ih])

    def _power(self, T: np.ndarray) -> np.ndarray:
        return 2.0 * self.cp * np.abs(T / 2.0) ** 1.5 + self.p_pb

    def _accel(self, u: np.ndarray, T: np.ndarray) -> np.ndarray:
        return (T - self.x_uu * u * u) / self.m_eff

    def objective(self, z: np.ndarray) -> float:
        _, _, T, h = self.split(z)
        return float(h * (self.w @ self._power(T)))

    def objective_grad(self, z: np.ndarray) -> np.ndarray:
        _, _, T, h = self.split(z)
        g = np.zeros(self.dim)
        g[self.iT] = h * self.w * 1.5 * self.cp * np.sqrt(np.abs(T) / 2.0) * np.sign(T)
        g[self.ih] = float(self.w @ self._power(T))
        return g

    def objective_hess(self, z: np.ndarray) -> sp.csr_matrix:
        """Exact objective Hessian; the |T|^-0.5 curvature is capped near T = 0."""
        _, _, T, h = self.split(z)
        half = np.maximum(np.abs(T) / 2.0, 1e-4)
        w_pp = 0.375 * self.cp / np.sqrt(half)          # d2 power / dT2
        w_p = 1.5 * self.cp * np.sqrt(np.abs(T) / 2.0) * np.sign(T)
        rows, cols, vals = [], [], []
        for k in range(self.n + 1):
            i = self.iT.start + k
            rows.append(i)
            cols.append(i)
            vals.append(h * self.w[k] * w_pp[k])
            cross = self.w[k] * w_p[k]
            rows.extend((i, self.ih))
            cols.extend((self.ih, i))
            vals.extend((cross, cross))
        return sp.csr_matrix((vals, (rows, cols)), shape=(self.dim, self.dim))

    def defects(self, z: np.ndarray) -> np.ndarray:
        u, x, T, h = self.split(z)
        f = self._accel(u, T)
        d_x = x[1:] - x[:-1] - 0.5 * h * (u[:-1] + u[1:])
        d_u = u[1:] - u[:-1] - 0.5 * h * (f[:-1] + f[1:])
        return np.concatenate([d_x, d_u])

    def defects_jac(self, z: np.ndarray) -> sp.csr_matrix:
        u, _, T, h = self.split(z)
        n = self.n
        f = self._accel(u, T)
        fp = -2.0 * self.x_uu * u / self.m_eff  # df/du

        rows, cols, vals = [], [], []

        def add(r, c, v):
            rows.append(r)
            cols.append(c)
            vals.append(v)

        for k in range(n):
            # position defect row k
            add(k, self.ix.start + k, -1.0)
            add(k, self.ix.start + k + 1, 1.0)
            add(k, k, -0.5 * h)
            add(k, k + 1, -0.5 * h)
            add(k, self.ih, -0.5 * (u[k] + u[k + 1]))
            # speed defect row n + k
            r = n + k
            add(r, k, -1.0 - 0.5 * h * fp[k])
            add(r, k + 1, 1.0 - 0.5 * h * fp[k + 1])
            add(r, self.iT.start + k, -0.5 * h / self.m_eff)
            add(r, self.iT.start + k + 1, -0.5 * h / self.m_eff)
            add(r, self.ih, -0.5 * (f[k] + f[k + 1]))
        return sp.csr_matrix((vals, (rows, cols)), shape=(2 * n, self.dim))

    def defects_hess(self, z: np.ndarray, v: np.ndarray) -> sp.csr_matrix:
        """Hessian of v @ defects (exact; the defects are quadratic in (u, h)
        and bilinear in (T, h))."""
        u, _, _, h = self.split(z)
        n = self.n
        fp = -2.0 * self.x_uu * u / self.m_eff
        fpp = -2.0 * self.x_uu / self.m_eff
        vx, vu = v[:n], v[n:]

        diag_u = np.zeros(n + 1)       # d2/du_k^2
        cross_u = np.zeros(n + 1)      # d2/du_k dh
        cross_T = np.zeros(n + 1)      # d2/dT_k dh
        for k in range(n):
            diag_u[k] += -0.5 * h * fpp * vu[k]
            diag_u[k + 1] += -0.5 * h * fpp * vu[k]
            cross_u[k] += -0.5 * vx[k] - 0.5 * fp[k] * vu[k]
            cross_u[k + 1] += -0.5 * vx[k] - 0.5 * fp[k + 1] * vu[k]
            cross_T[k] += -0.5 * vu[k] / self.m_eff
            cross_T[k + 1] += -0.5 * vu[k] / self.m_eff

        rows, cols, vals = [], [], []
        for k in range(n + 1):
            if diag_u[k] != 0.0:
                rows.append(k)
                cols.append(k)
                vals.append(diag_u[k])
            for c_val, c_col in ((cross_u[k], k), (cross_T[k], self.iT.start + k)):
                if c_val != 0.0:
                    rows.extend((c_col, self.ih))
                    cols.extend((self.ih, c_col))
                    vals.extend((c_val, c_val))
        return sp.csr_matrix((vals, (rows, cols)), shape=(self.dim, self.dim))

    def t_static(self) -> float:
        return max(self.pb.distance, 1e-2) / self.u_star

    def initial_guess(self) -> np.ndarray:
        pb = self.pb
        z = np.zeros(self.dim)
        u = np.full(self.n + 1, self.u_star)
        u[0] = pb.u0
        z[self.iu] = u
        z[self.ix] = np.linspace(pb.x0, pb.x_f, self.n + 1)
        z[self.iT] = np.clip(self.x_uu * self.u_star ** 2, pb.t_min, pb.t_max)
        z[self.ih] = self.t_static() / self.n
        return z

    def coast_guess(self) -> np.ndarray:
        """Alternate seed: decay from u0 toward the optimum speed, zero thrust."""
        pb = self.pb
        z = self.initial_guess()
        s = np.linspace(0.0, 1.0, self.n + 1)
        u = self.u_star + (pb.u0 - self.u_star) * np.exp(-5.0 * s)
        z[self.iu] = np.clip(u, 0.0, pb.u_max)
        z[self.iT] = 0.0
        return z

    def bounds(self) -> Bounds:
        pb = self.pb
        lb = np.empty(self.dim)
        ub = np.empty(self.dim)
        lb[self.iu] = 0.0
        ub[self.iu] = max(pb.u_max, pb.u0)
        lb[self.ix] = pb.x0
        ub[self.ix] = pb.x_f
        lb[self.iT] = pb.t_min
        ub[self.iT] = pb.t_max
        # the step length is boxed around the constant-speed estimate, which
        # keeps the time variable from running away on cold starts
        h_ref = self.t_static() / self.n
        lb[self.ih] = 0.02 * h_ref
        ub[self.ih] = 5.0 * h_ref
        # boundary conditions pinned through the bounds
        lb[self.iu.start] = ub[self.iu.start] = pb.u0
        lb[self.ix.start] = ub[self.ix.start] = pb.x0
        lb[self.ix.stop - 1] = ub[self.ix.stop - 1] = pb.x_f
        return Bounds(lb, ub)


def _attempt(tr: _Transcription, z0: np.ndarray, max_iterations: int,
             penalty: float):
    constraint = NonlinearConstraint(tr.defects, 0.0, 0.0, jac=tr.defects_jac,
                                     hess=tr.defects_hess)
    return minimize(
        tr.objective, z0, jac=tr.objective_grad, method="trust-constr",
        hess=tr.objective_hess, constraints=[constraint], bounds=tr.bounds(),
        options={"maxiter": max_iterations, "gtol": 1e-8, "xtol": 1e-10,
                 "initial_constr_penalty": penalty, "verbose": 0},
    )


def _solve_single(problem: CollocationProblem, z0: np.ndarray | None,
                  max_iterations: int) -> CollocationSolution:
    tr = _Transcription(problem)
    attempts = []
    if z0 is not None:
        attempts.append((z0, 1.0))
    attempts += [(tr.initial_guess(), 1.0), (tr.initial_guess(), 100.0),
                 (tr.coast_guess(), 10.0)]

    result = None
    for seed, penalty in attempts:
        result = _attempt(tr, seed, max_iterations, penalty)
        if (result.status in (1, 2)
                and np.max(np.abs(tr.defects(result.x))) <= DEFECT_TOL):
            break

    u, x, T, h = tr.split(result.x)
    t_travel = h * problem.n
    defect_violation = float(np.max(np.abs(tr.defects(result.x))))
    energy = tr.objective(result.x)
    converged = defect_violation <= DEFECT_TOL and result.status in (1, 2)
    sol = CollocationSolution(
        t=np.linspace(0.0, t_travel, problem.n + 1), x=x.copy(), u=u.copy(),
        T_total=T.copy(), t_travel=t_travel, energy=energy,
        defect_violation=defect_violation,
        kkt_residual=float(result.optimality), converged=converged,
        message=str(result.message))
    if not converged:
        raise CollocationError(
            f"collocation did not converge: defect={defect_violation:.2e}, "
            f"status={result.status}, {result.message}")
    return sol


def _interpolate(sol: CollocationSolution, problem: CollocationProblem) -> np.ndarray:
    tr = _Transcription(problem)
    s_coarse = np.linspace(0.0, 1.0, len(sol.u))
    s_fine = np.linspace(0.0, 1.0, problem.n + 1)
    z = np.zeros(tr.dim)
    z[tr.iu] = np.interp(s_fine, s_coarse, sol.u)
    z[tr.ix] = np.interp(s_fine, s_coarse, sol.x)
    z[tr.iT] = np.interp(s_fine, s_coarse, sol.T_total)
    z[tr.ih] = max(sol.t_travel, 1e-2) / problem.n
    return z


def solve(problem: CollocationProblem, coarse_n: int = 60,
          max_iterations: int = 400) -> CollocationSolution:
    """Solve the minimum-energy transfer; returns the transcribed optimum.

    The grid is refined geometrically from ``coarse_n`` segments up to the
    requested resolution, each level warm-started from the previous one; fine
    grids solved cold are much slower and occasionally diverge.
    """
    if problem.x_f == problem.x0:
        return _trivial_solution(problem)

    levels = []
    if coarse_n and coarse_n < problem.n:
        level = coarse_n
        while level * 2.5 < problem.n:
            levels.append(level)
            level = int(level * 2.5)
        levels.append(level)
    levels.append(problem.n)

    z0 = None
    sol = None
    for n_level in levels:
        pb = CollocationProblem(
            params=problem.params, x0=problem.x0, x_f=problem.x_f,
            u0=problem.u0, n=n_level, t_min=problem.t_min,
            t_max=problem.t_max, u_max=problem.u_max)
        if sol is not None:
            z0 = _interpolate(sol, pb)
        sol = _solve_single(pb, z0, max_iterations)
    return sol


def reference_energy(x_remaining: float, u_start: float, params: VehicleParams,
                     n: int = 150, t_min: float = -15.72,
                     t_max: float = 15.72) -> float:
    """Minimum energy [J] to cover ``x_remaining`` starting at speed ``u_start``.

    This re-solves the transfer from an arbitrary state; it is the reference
    the receding-horizon controllers' closed-loop energies are measured
    against.  Short transfers use proportionally fewer segments.
    """
    if x_remaining < 0 or u_start < 0:
        raise ValueError("x_remaining and u_start must be nonnegative")
    if x_remaining == 0.0:
        return 0.0
    n_eff = int(min(n, max(20, round(30 * x_remaining))))
    problem = CollocationProblem(params=params, x0=0.0, x_f=x_remaining,
                                 u0=u_start, n=n_eff, t_min=t_min, t_max=t_max)
    return solve(problem).energy
