"""Reduced surge prediction model used inside the receding-horizon controllers.

The controllers predict only (x, u); every other velocity and the attitude are
sampled from the plant once per solve and held frozen over the horizon.  Surge
speed is assumed nonnegative, so the drag term is written as u^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .params import VehicleParams


@dataclass(frozen=True)
class SurgeState:
    """Along-track position x [m] and surge speed u [m/s] (u >= 0)."""

    x: float = 0.0
    u: float = 0.0


@dataclass(frozen=True)
class FrozenContext:
    """Non-surge quantities held constant over a prediction horizon."""

    v: float = 0.0
    w: float = 0.0
    p: float = 0.0
    q: float = 0.0
    r: float = 0.0
    phi: float = 0.0
    theta: float = 0.0
    psi: float = 0.0

    @classmethod
    def from_state(cls, nu, eta) -> "FrozenContext":
        return cls(v=float(nu[1]), w=float(nu[2]), p=float(nu[3]), q=float(nu[4]),
                   r=float(nu[5]), phi=float(eta[3]), theta=float(eta[4]),
                   psi=float(eta[5]))

    def bias_force(self, params: VehicleParams) -> float:
        """Constant surge force [N] from frozen cross-couplings and gravity."""
        m = params.m
        coupling = m * (self.w * self.q - self.v * self.r
                        + params.z_g * self.p * self.r)
        gravity = (params.W - params.B) * math.sin(self.theta)
        return -coupling - gravity

    def x_rate_coefficients(self) -> tuple[float, float]:
        """(alpha, beta) with x_dot = alpha * u + beta for the frozen attitude."""
        cphi, sphi = math.cos(self.phi), math.sin(self.phi)
        cth, sth = math.cos(self.theta), math.sin(self.theta)
        cpsi, spsi = math.cos(self.psi), math.sin(self.psi)
        alpha = cpsi * cth
        beta = ((cpsi * sth * sphi - spsi * cphi) * self.v
                + (spsi * sphi + cpsi * sth * cphi) * self.w)
        return alpha, beta


def surge_derivative(state: SurgeState, ctx: FrozenContext, T_total: float,
                     params: VehicleParams) -> tuple[float, float]:
    """(x_dot, u_dot) of the decoupled surge model under total horizontal thrust."""
    m_eff = params.m - params.X_du
    u_dot = (-params.X_uu * state.u * state.u + T_total
             + ctx.bias_force(params)) / m_eff
    alpha, beta = ctx.x_rate_coefficients()
    return alpha * state.u + beta, u_dot


def surge_rollout(s0: SurgeState, ctx: FrozenContext, inputs, dt: float,
                  params: VehicleParams) -> list[SurgeState]:
    """Forward-Euler propagation over the horizon; returns N+1 states incl. s0.

    Surge speed is clamped at zero from below (reverse surge is outside the
    model's validity).
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    m_eff = params.m - params.X_du
    bias = ctx.bias_force(params)
    alpha, beta = ctx.x_rate_coefficients()
    x, u = s0.x, s0.u
    out = [SurgeState(x, u)]
    for T in inputs:
        x = x + dt * (alpha * u + beta)
        u = u + dt * (-params.X_uu * u * u + T + bias) / m_eff
        if u < 0.0:
            u = 0.0
        out.append(SurgeState(x, u))
    return out
