"""Vehicle physical parameters and the flat key-value parameter file format."""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from pathlib import Path


@dataclass(frozen=True)
class VehicleParams:
    """Physical constants of the vehicle.

    Added-mass coefficients follow the usual sign convention (negative values;
    the effective inertia in each DOF is e.g. ``m - X_du``).  Drag coefficients
    are the positive quadratic-drag magnitudes.  Defaults describe a small
    positively buoyant spherical survey vehicle with two horizontal and two
    vertical thrusters.
    """

    W: float = 200.116        # weight [N]
    B: float = 201.586        # buoyancy [N]
    m: float = 20.42          # rigid-body mass [kg]
    I_xx: float = 0.1205      # roll inertia [kg m^2]
    I_yy: float = 0.9431      # pitch inertia [kg m^2]
    I_zz: float = 1.0061      # yaw inertia [kg m^2]
    z_g: float = 0.0018       # CG offset below body origin [m]
    l_1: float = 0.1694       # vertical-thruster moment arm [m]
    l_2: float = 0.2794       # horizontal-thruster moment arm [m]
    R: float = 0.025          # thruster radius [m]
    X_du: float = -2.042      # added mass, surge [kg]
    Y_dv: float = -32.2013    # added mass, sway [kg]
    Z_dw: float = -32.2013    # added mass, heave [kg]
    K_dp: float = -0.0805     # added inertia, roll [kg m^2]
    M_dq: float = -2.6834     # added inertia, pitch [kg m^2]
    N_dr: float = -2.6834     # added inertia, yaw [kg m^2]
    X_uu: float = 48.17       # quadratic drag, surge [kg/m]
    Y_vv: float = 4.11        # quadratic drag, sway [kg/m]
    Z_ww: float = 4.11        # quadratic drag, heave [kg/m]
    K_pp: float = 48.17       # quadratic drag, roll [kg m^2]
    M_qq: float = 4.11        # quadratic drag, pitch [kg m^2]
    N_rr: float = 4.11        # quadratic drag, yaw [kg m^2]
    rho: float = 1025.0       # water density [kg/m^3]

    def __post_init__(self) -> None:
        # neutral buoyancy (B == W) is allowed as a degenerate edge; a heavy
        # vehicle (B < W) is outside the model
        if not (self.B >= self.W > 0):
            raise ValueError(f"vehicle must not be negatively buoyant: W={self.W}, B={self.B}")
        for name in ("X_du", "Y_dv", "Z_dw", "K_dp", "M_dq", "N_dr",
                     "X_uu", "Y_vv", "Z_ww", "K_pp", "M_qq", "N_rr"):
            if abs(getattr(self, name)) <= 0.0:
                raise ValueError(f"coefficient {name} must have nonzero magnitude")
        if self.rho <= 0 or self.R <= 0 or self.m <= 0:
            raise ValueError("rho, R and m must be positive")

    @property
    def C_p(self) -> float:
        """Power conversion ratio [W/N^1.5]: sqrt(1/(2*pi*rho))/R."""
        return math.sqrt(1.0 / (2.0 * math.pi * self.rho)) / self.R

    @property
    def net_buoyancy(self) -> float:
        """B - W [N], the constant upward force the vertical thrusters fight."""
        return self.B - self.W


_FIELD_NAMES = tuple(f.name for f in fields(VehicleParams))


def load_params(path: str | Path) -> VehicleParams:
    """Load vehicle parameters from a flat ``symbol = value`` text file.

    Keys are the parameter symbol names (``W``, ``X_uu``, ...).  Lines that are
    blank or start with ``#`` are skipped.  Unknown keys are rejected; keys not
    present keep their defaults.
    """
    values: dict[str, float] = {}
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'symbol = value', got {raw!r}")
        key, _, rhs = line.partition("=")
        key = key.strip()
        if key not in _FIELD_NAMES:
            raise ValueError(f"{path}:{lineno}: unknown parameter {key!r}")
        if key in values:
            raise ValueError(f"{path}:{lineno}: duplicate parameter {key!r}")
        try:
            values[key] = float(rhs.strip())
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: bad value for {key!r}: {rhs.strip()!r}") from exc
    return VehicleParams(**values)


def params_from_mapping(mapping: dict[str, float]) -> VehicleParams:
    """Build VehicleParams from a dict of symbol names, rejecting unknown keys."""
    unknown = set(mapping) - set(_FIELD_NAMES)
    if unknown:
        raise ValueError(f"unknown vehicle parameters: {sorted(unknown)}")
    return VehicleParams(**{k: float(v) for k, v in mapping.items()})
