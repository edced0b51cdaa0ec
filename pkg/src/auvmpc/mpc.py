"""Receding-horizon surge controllers.

Three controllers share one finite-horizon bound-constrained minimizer:

* ``TrackingMpc`` drives surge speed to a setpoint (squared velocity error).
* ``EnergyOptimalMpc`` minimizes predicted thruster energy plus a cost-to-go
  term equal to remaining distance times the steady-cruise energy-per-distance
  at the horizon-end speed, so the optimizer trades acceleration energy
  against hover energy without needing a long horizon.
* ``SwitchingMpc`` wraps the energy-optimal controller in a cruise-hold logic
  that skips the solve while the vehicle sits near the static optimum speed,
  re-optimizing only during transients and the final approach.

The inner solver is projected gradient descent with Armijo backtracking, a
shift-by-one warm start, and a coordinate-search fallback on stall.  Gradients
are exact adjoints of the Euler prediction rollout.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .energy import drag_power_coefficient, heave_hover_power, static_optimal_velocity
from .params import VehicleParams
from .surge import FrozenContext, SurgeState


@dataclass(frozen=True)
class MpcConfig:
    horizon: int = 15            # prediction steps
    dt: float = 0.1              # [s] controller sampling time
    t_min: float = -15.72        # [N] total horizontal thrust bounds
    t_max: float = 15.72
    x_f: float = 10.0            # [m] destination
    u_floor: float = 1e-3        # [m/s] cost-to-go speed floor
    max_iterations: int = 120
    tolerance: float = 1e-8      # relative cost-decrease stopping threshold
    warm_start: bool = True

    def __post_init__(self) -> None:
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        if not self.t_min < self.t_max:
            raise ValueError("t_min must be < t_max")
        if self.u_floor <= 0:
            raise ValueError("u_floor must be positive")
        if self.dt <= 0:
            raise ValueError("dt must be positive")


@dataclass(frozen=True)
class SwitchConfig:
    """Cruise-hold thresholds for the switching controller."""

    u_switch_low: float
    u_switch_high: float
    x_switch: float

    def __post_init__(self) -> None:
        if not self.u_switch_low < self.u_switch_high:
            raise ValueError("speed band must satisfy u_switch_low < u_switch_high")

    @classmethod
    def from_params(cls, params: VehicleParams, x_f: float,
                    band: float = 0.05) -> "SwitchConfig":
        """Thresholds at +/- ``band`` around the static optimum speed; the
        re-optimization point backs off the destination by 1.5 cruise-lengths
        of the zero-thrust coast time from the optimum speed to a quarter of it
        (quadratic-drag coast: t = 3*(m - X_du)/(X_uu * u*))."""
        u_star = static_optimal_velocity(params)
        t_brake = 3.0 * (params.m - params.X_du) / (params.X_uu * u_star)
        return cls(
            u_switch_low=(1.0 - band) * u_star,
            u_switch_high=(1.0 + band) * u_star,
            x_switch=x_f - 1.5 * u_star * t_brake,
        )


@dataclass(frozen=True)
class ControlDecision:
    """One control step's output."""

    T_total: float               # [N]
    solver_invoked: bool
    predicted_cost: float        # [J] (or squared-error for the tracking law)
    solve_time: float            # [s] wall-clock around the solve only


@dataclass
class SolveResult:
    inputs: np.ndarray
    cost: float
    iterations: int
    converged: bool


# ---------------------------------------------------------------------------
# prediction rollout and cost functions
# ---------------------------------------------------------------------------

def _rollout(s0: SurgeState, ctx: FrozenContext, T: np.ndarray, dt: float,
             params: VehicleParams):
    """Euler rollout returning (u states, x states, clamp-active flags)."""
    n = len(T)
    m_eff = params.m - params.X_du
    bias = ctx.bias_force(params)
    alpha, beta = ctx.x_rate_coefficients()
    us = np.empty(n + 1)
    xs = np.empty(n + 1)
    clamped = np.zeros(n + 1, dtype=bool)
    us[0], xs[0] = s0.u, s0.x
    for k in range(n):
        xs[k + 1] = xs[k] + dt * (alpha * us[k] + beta)
        u_next = us[k] + dt * (-params.X_uu * us[k] * us[k] + T[k] + bias) / m_eff
        if u_next < 0.0:
            u_next = 0.0
            clamped[k + 1] = True
        us[k + 1] = u_next
    return us, xs, clamped


def tracking_cost(u_ref: float, s0: SurgeState, ctx: FrozenContext,
                  inputs, cfg: MpcConfig, params: VehicleParams) -> float:
    """Sum of squared speed errors over the predicted horizon (first N inputs)."""
    T = np.asarray(inputs, dtype=float)[: cfg.horizon]
    us, _, _ = _rollout(s0, ctx, T, cfg.dt, params)
    err = u_ref - us[1:]
    return float(err @ err)


def stage_cost(inputs, cfg: MpcConfig, params: VehicleParams) -> float:
    """Predicted thruster energy [J]: per step, two horizontal thrusters at
    half the total demand plus the constant hover power."""
    T = np.asarray(inputs, dtype=float)[: cfg.horizon]
    p_pb = heave_hover_power(params)
    power = 2.0 * params.C_p * np.abs(T / 2.0) ** 1.5 + p_pb
    return float(np.sum(power) * cfg.dt)


def terminal_cost(s_N: SurgeState, cfg: MpcConfig, params: VehicleParams) -> float:
    """Cost-to-go [J]: remaining distance times energy-per-distance at the
    horizon-end speed, clamped to stay finite and nonnegative."""
    remaining = max(cfg.x_f - s_N.x, 0.0)
    u_den = max(s_N.u, cfg.u_floor)
    a = drag_power_coefficient(params)
    return remaining / u_den * (heave_hover_power(params) + a * s_N.u ** 3)


def energy_cost(s0: SurgeState, ctx: FrozenContext, inputs,
                cfg: MpcConfig, params: VehicleParams) -> float:
    """Stage energy plus cost-to-go at the rollout end."""
    T = np.asarray(inputs, dtype=float)[: cfg.horizon]
    us, xs, _ = _rollout(s0, ctx, T, cfg.dt, params)
    return stage_cost(T, cfg, params) + terminal_cost(
        SurgeState(float(xs[-1]), float(us[-1])), cfg, params)


def _stage_grad(T: np.ndarray, cfg: MpcConfig, params: VehicleParams) -> np.ndarray:
    return 1.5 * params.C_p * np.sqrt(np.abs(T) / 2.0) * np.sign(T) * cfg.dt


def _terminal_partials(x_N: float, u_N: float, cfg: MpcConfig,
                       params: VehicleParams) -> tuple[float, float]:
    """(dJ/dx_N, dJ/du_N) of the clamped cost-to-go."""
    remaining = cfg.x_f - x_N
    if remaining <= 0.0:
        return 0.0, 0.0
    a = drag_power_coefficient(params)
    p_pb = heave_hover_power(params)
    if u_N > cfg.u_floor:
        d_x = -(p_pb + a * u_N ** 3) / u_N
        d_u = remaining * (2.0 * a * u_N - p_pb / (u_N * u_N))
    else:
        d_x = -(p_pb + a * u_N ** 3) / cfg.u_floor
        d_u = remaining * 3.0 * a * u_N * u_N / cfg.u_floor
    return d_x, d_u


def energy_cost_gradient(s0: SurgeState, ctx: FrozenContext, inputs,
                         cfg: MpcConfig, params: VehicleParams) -> np.ndarray:
    """Exact gradient of ``energy_cost`` w.r.t. the input sequence (adjoint)."""
    T = np.asarray(inputs, dtype=float)[: cfg.horizon]
    us, xs, clamped = _rollout(s0, ctx, T, cfg.dt, params)
    dt = cfg.dt
    m_eff = params.m - params.X_du
    alpha, _ = ctx.x_rate_coefficients()

    lam_x, lam_u = _terminal_partials(float(xs[-1]), float(us[-1]), cfg, params)
    g = _stage_grad(T, cfg, params)
    for k in range(len(T) - 1, -1, -1):
        act = 0.0 if clamped[k + 1] else 1.0
        g[k] += lam_u * act * dt / m_eff
        lam_u = (lam_u * act * (1.0 - 2.0 * dt * params.X_uu * us[k] / m_eff)
                 + lam_x * dt * alpha)
    return g


def tracking_cost_gradient(u_ref: float, s0: SurgeState, ctx: FrozenContext,
                           inputs, cfg: MpcConfig,
                           params: VehicleParams) -> np.ndarray:
    """Exact gradient of ``tracking_cost`` w.r.t. the input sequence (adjoint)."""
    T = np.asarray(inputs, dtype=float)[: cfg.horizon]
    us, _, clamped = _rollout(s0, ctx, T, cfg.dt, params)
    dt = cfg.dt
    m_eff = params.m - params.X_du
    g = np.zeros(len(T))
    lam_u = -2.0 * (u_ref - us[-1])
    for k in range(len(T) - 1, -1, -1):
        act = 0.0 if clamped[k + 1] else 1.0
        g[k] = lam_u * act * dt / m_eff
        lam_u = lam_u * act * (1.0 - 2.0 * dt * params.X_uu * us[k] / m_eff)
        if k >= 1:
            lam_u += -2.0 * (u_ref - us[k])
    return g


# ---------------------------------------------------------------------------
# bound-constrained minimizer
# ---------------------------------------------------------------------------

def _coordinate_polish(cost_fn, x: np.ndarray, fx: float, lo: float, hi: float,
                       step: float, rounds: int = 3):
    """Greedy per-coordinate search; rescues the rare stall of the gradient loop."""
    for _ in range(rounds):
        improved = False
        for k in range(len(x)):
            base = x[k]
            for cand in (min(base + step, hi), max(base - step, lo)):
                if cand == base:
                    continue
                x[k] = cand
                fc = cost_fn(x)
                if fc < fx:
                    fx = fc
                    base = cand
                    improved = True
                else:
                    x[k] = base
            x[k] = base
        if not improved:
            step *= 0.25
    return x, fx


def solve_horizon(cost_fn, s0: SurgeState, ctx: FrozenContext, cfg: MpcConfig,
                  warm_start: np.ndarray | None = None, grad_fn=None,
                  params: VehicleParams | None = None) -> SolveResult:
    """Minimize a horizon cost over box-bounded input sequences.

    ``cost_fn(T) -> float`` and optionally ``grad_fn(T) -> array``; without a
    gradient callback central finite differences are used.  The returned cost
    never exceeds the best of the all-zero, warm-start and constant cruise
    thrust candidates, and the solve is deterministic.
    """
    n = cfg.horizon
    lo, hi = cfg.t_min, cfg.t_max

    candidates = [np.zeros(n)]
    if warm_start is not None and len(warm_start) == n:
        candidates.append(np.clip(np.asarray(warm_start, dtype=float), lo, hi))
    if params is not None:
        u_star = static_optimal_velocity(params)
        cruise = float(np.clip(params.X_uu * u_star * u_star, lo, hi))
        candidates.append(np.full(n, cruise))

    if grad_fn is None:
        def grad_fn(T, h=1e-6):
            g = np.empty(n)
            for k in range(n):
                Tp, Tm = T.copy(), T.copy()
                Tp[k] += h
                Tm[k] -= h
                g[k] = (cost_fn(Tp) - cost_fn(Tm)) / (2 * h)
            return g

    costs = [cost_fn(c) for c in candidates]
    best = int(np.argmin(costs))
    x = candidates[best].copy()
    fx = costs[best]

    step = 1.0
    iterations = 0
    converged = False
    for _ in range(cfg.max_iterations):
        iterations += 1
        g = grad_fn(x)
        accepted = False
        for _ in range(40):
            x_new = np.clip(x - step * g, lo, hi)
            d = x - x_new
            decrease = float(g @ d)
            if decrease <= 0.0:
                break
            f_new = cost_fn(x_new)
            if f_new <= fx - 1e-4 * decrease:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            # gradient step stalled; try a coordinate search before giving up
            probe = min(max(step, 1e-3), 0.1) * (hi - lo)
            x, f_polished = _coordinate_polish(cost_fn, x.copy(), fx, lo, hi,
                                               step=probe)
            if f_polished < fx - cfg.tolerance * (1.0 + abs(fx)):
                fx = f_polished
                continue
            fx = f_polished
            converged = True
            break
        if fx - f_new <= cfg.tolerance * (1.0 + abs(fx)):
            x, fx = x_new, f_new
            converged = True
            break
        x, fx = x_new, f_new
        step = min(step * 1.5, 1e6)
    return SolveResult(inputs=x, cost=fx, iterations=iterations, converged=converged)


# ---------------------------------------------------------------------------
# controllers
# ---------------------------------------------------------------------------

class TrackingMpc:
    """Receding-horizon speed-setpoint tracker (velocity error only; the input
    box bounds are the sole regularization)."""

    name = "T-MPC"

    def __init__(self, cfg: MpcConfig, params: VehicleParams,
                 u_ref: float | None = None):
        self.cfg = cfg
        self.params = params
        self.u_ref = static_optimal_velocity(params) if u_ref is None else u_ref
        self._prev_inputs: np.ndarray | None = None

    def _warm(self) -> np.ndarray | None:
        if not self.cfg.warm_start or self._prev_inputs is None:
            return None
        return np.append(self._prev_inputs[1:], self._prev_inputs[-1])

    def step(self, nu: np.ndarray, eta: np.ndarray) -> ControlDecision:
        s0 = SurgeState(float(eta[0]), max(float(nu[0]), 0.0))
        ctx = FrozenContext.from_state(nu, eta)
        cost = lambda T: tracking_cost(self.u_ref, s0, ctx, T, self.cfg, self.params)
        grad = lambda T: tracking_cost_gradient(self.u_ref, s0, ctx, T,
                                                self.cfg, self.params)
        t0 = time.perf_counter()
        res = solve_horizon(cost, s0, ctx, self.cfg, warm_start=self._warm(),
                            grad_fn=grad, params=self.params)
        dt_solve = time.perf_counter() - t0
        self._prev_inputs = res.inputs
        return ControlDecision(T_total=float(res.inputs[0]), solver_invoked=True,
                               predicted_cost=res.cost, solve_time=dt_solve)


class EnergyOptimalMpc:
    """Receding-horizon energy minimizer with the cruise cost-to-go terminal term."""

    name = "EO-MPC"

    def __init__(self, cfg: MpcConfig, params: VehicleParams):
        self.cfg = cfg
        self.params = params
        self._prev_inputs: np.ndarray | None = None

    def _warm(self) -> np.ndarray | None:
        if not self.cfg.warm_start or self._prev_inputs is None:
            return None
        return np.append(self._prev_inputs[1:], self._prev_inputs[-1])

    def step(self, nu: np.ndarray, eta: np.ndarray) -> ControlDecision:
        s0 = SurgeState(float(eta[0]), max(float(nu[0]), 0.0))
        ctx = FrozenContext.from_state(nu, eta)
        cost = lambda T: energy_cost(s0, ctx, T, self.cfg, self.params)
        grad = lambda T: energy_cost_gradient(s0, ctx, T, self.cfg, self.params)
        t0 = time.perf_counter()
        res = solve_horizon(cost, s0, ctx, self.cfg, warm_start=self._warm(),
                            grad_fn=grad, params=self.params)
        dt_solve = time.perf_counter() - t0
        self._prev_inputs = res.inputs
        return ControlDecision(T_total=float(res.inputs[0]), solver_invoked=True,
                               predicted_cost=res.cost, solve_time=dt_solve)


class SwitchingMpc:
    """Energy-optimal controller with a cruise-hold switching rule.

    While short of the re-optimization point: starting below the optimum
    speed, solve while speed is under the low threshold or still climbing,
    otherwise repeat the previous thrust; starting above, solve while speed
    exceeds the high threshold or the last two thrusts were increasing.  From
    the re-optimization point onward every step is solved.
    """

    name = "RTEO-MPC"

    def __init__(self, cfg: MpcConfig, params: VehicleParams,
                 switch: SwitchConfig | None = None):
        self.cfg = cfg
        self.params = params
        self.switch = switch or SwitchConfig.from_params(params, cfg.x_f)
        self.u_star = static_optimal_velocity(params)
        self.inner = EnergyOptimalMpc(cfg, params)
        self._u0: float | None = None        # trip initial speed
        self._prev_u: float | None = None    # u_{t-1}
        self._prev_T: float | None = None    # T_{t-1}
        self._prev_prev_T: float | None = None

    def _should_solve(self, x_t: float, u_t: float) -> bool:
        if x_t >= self.switch.x_switch:
            return True
        if self._prev_T is None or self._prev_u is None:
            return True
        if self._u0 < self.u_star:
            return u_t < self.switch.u_switch_low or self._prev_u < u_t
        if self._prev_prev_T is None:
            return True
        return u_t > self.switch.u_switch_high or self._prev_prev_T < self._prev_T

    def step(self, nu: np.ndarray, eta: np.ndarray) -> ControlDecision:
        u_t, x_t = float(nu[0]), float(eta[0])
        if self._u0 is None:
            self._u0 = u_t
        if self._should_solve(x_t, u_t):
            decision = self.inner.step(nu, eta)
        else:
            t0 = time.perf_counter()
            T_hold = float(np.clip(self._prev_T, self.cfg.t_min, self.cfg.t_max))
            decision = ControlDecision(T_total=T_hold, solver_invoked=False,
                                       predicted_cost=math.nan,
                                       solve_time=time.perf_counter() - t0)
        self._prev_u = u_t
        self._prev_prev_T = self._prev_T
        self._prev_T = decision.T_total
        return decision
