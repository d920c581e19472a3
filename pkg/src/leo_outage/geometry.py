"""Spherical geometry of a terminal at the pole and satellites on a shell.

All lengths in metres, angles in radians.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import BeamMissesEarth, DomainError

EARTH_RADIUS = 6378e3

_SLACK = 1e-12


def _clamp_unit(value: float, what: str) -> float:
    # roundoff gets clamped, genuine out-of-range arguments are errors
    if value > 1.0:
        if value > 1.0 + _SLACK:
            raise DomainError(f"{what}: argument {value!r} > 1")
        return 1.0
    if value < -1.0:
        if value < -1.0 - _SLACK:
            raise DomainError(f"{what}: argument {value!r} < -1")
        return -1.0
    return value


@dataclass(frozen=True)
class EarthGeometry:
    a: float
    r_e: float = EARTH_RADIUS

    def __post_init__(self):
        if not (self.r_e > 0 and self.a > 0):
            raise DomainError(f"need r_e > 0 and a > 0, got r_e={self.r_e}, a={self.a}")

    @property
    def shell_radius(self) -> float:
        return self.r_e + self.a

    @property
    def horizon_range(self) -> float:
        """Slant range to a satellite on the horizon (zero elevation)."""
        return math.sqrt(self.a * self.a + 2.0 * self.r_e * self.a)

    @property
    def cap_scale(self) -> float:
        """4 r_e (r_e + a); the cap fraction is (x^2 - a^2) / cap_scale."""
        return 4.0 * self.r_e * (self.r_e + self.a)

    @property
    def far_range(self) -> float:
        """Distance to the antipodal point of the shell."""
        return 2.0 * self.r_e + self.a


@dataclass(frozen=True)
class GeometryDerived:
    geo: EarthGeometry
    theta_min: float
    omega_th: float
    d_max: float
    psi_max: float
    psi_th: float
    d_th: float
    area_total: float
    area_vis: float
    area_ml: float
    area_sl: float

    @property
    def kappa_max(self) -> float:
        return cap_fraction(self.d_max, self.geo)

    @property
    def kappa_th(self) -> float:
        return cap_fraction(self.d_th, self.geo)


def max_slant_range(theta_min: float, geo: EarthGeometry) -> float:
    if not (0.0 <= theta_min <= math.pi / 2):
        raise DomainError(f"theta_min={theta_min!r} outside [0, pi/2]")
    s = math.sin(theta_min)
    r_e, a = geo.r_e, geo.a
    return math.sqrt(r_e * r_e * s * s + a * a + 2.0 * r_e * a) - r_e * s


def _check_range(d_max: float, geo: EarthGeometry) -> None:
    lo, hi = geo.a, geo.horizon_range
    if not (lo * (1 - _SLACK) <= d_max <= hi * (1 + _SLACK)):
        raise DomainError(f"d_max={d_max!r} outside [{lo}, {hi}]")


def min_elevation_from_range(d_max: float, geo: EarthGeometry) -> float:
    _check_range(d_max, geo)
    r_e, a = geo.r_e, geo.a
    arg = ((r_e + a) ** 2 - d_max * d_max - r_e * r_e) / (2.0 * d_max * r_e)
    return math.asin(_clamp_unit(arg, "min_elevation_from_range"))


def max_polar_angle(d_max: float, geo: EarthGeometry) -> float:
    _check_range(d_max, geo)
    r_e, rs = geo.r_e, geo.shell_radius
    arg = (r_e * r_e + rs * rs - d_max * d_max) / (2.0 * r_e * rs)
    return math.acos(_clamp_unit(arg, "max_polar_angle"))


def threshold_polar_angle(omega_th: float, geo: EarthGeometry) -> float:
    """Polar angle of the main-lobe footprint edge for a beam of half-width ``omega_th``.

    Raises BeamMissesEarth when the edge ray passes beside the Earth.
    """
    if omega_th < 0:
        raise DomainError(f"omega_th={omega_th!r} < 0")
    arg = geo.shell_radius / geo.r_e * math.sin(omega_th)
    if arg > 1.0:
        raise BeamMissesEarth(f"omega_th={omega_th!r} rad: main-lobe edge misses the Earth")
    return math.asin(arg) - omega_th


def threshold_distance(psi_th: float, geo: EarthGeometry) -> float:
    if not (0.0 <= psi_th <= math.pi):
        raise DomainError(f"psi_th={psi_th!r} outside [0, pi]")
    r_e, rs = geo.r_e, geo.shell_radius
    # 1 - cos(psi) = 2 sin^2(psi/2) keeps precision for small angles
    return math.sqrt(geo.a**2 + 4.0 * r_e * rs * math.sin(psi_th / 2.0) ** 2)


def cap_fraction(x, geo: EarthGeometry):
    """Fraction of the shell within distance ``x`` of the terminal (scalar or array)."""
    import numpy as np

    arr = np.asarray(x, dtype=float)
    lo, hi = geo.a, geo.far_range
    if np.any(arr < lo * (1 - _SLACK)) or np.any(arr > hi * (1 + _SLACK)):
        raise DomainError(f"cap_fraction: x outside [{lo}, {hi}]")
    out = np.clip((arr * arr - lo * lo) / geo.cap_scale, 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def inverse_cap_fraction(y, geo: EarthGeometry):
    import numpy as np

    arr = np.asarray(y, dtype=float)
    if np.any(arr < 0) or np.any(arr > 1):
        raise DomainError("inverse_cap_fraction: y outside [0, 1]")
    out = np.sqrt(geo.a**2 + geo.cap_scale * arr)
    return float(out) if out.ndim == 0 else out


def surface_areas(theta_min: float, omega_th: float, geo: EarthGeometry) -> GeometryDerived:
    d_max = max_slant_range(theta_min, geo)
    psi_max = max_polar_angle(d_max, geo)
    try:
        psi_th = min(threshold_polar_angle(omega_th, geo), psi_max)
    except BeamMissesEarth:
        psi_th = psi_max
    d_th = min(threshold_distance(psi_th, geo), d_max) if psi_th < psi_max else d_max
    rs = geo.shell_radius
    area_total = 4.0 * math.pi * rs * rs
    area_vis = math.pi * rs * (d_max * d_max - geo.a**2) / geo.r_e
    if psi_th < psi_max:
        area_ml = min(4.0 * math.pi * rs * rs * math.sin(psi_th / 2.0) ** 2, area_vis)
    else:
        area_ml = area_vis
    area_sl = max(area_vis - area_ml, 0.0)
    return GeometryDerived(
        geo=geo,
        theta_min=theta_min,
        omega_th=omega_th,
        d_max=d_max,
        psi_max=psi_max,
        psi_th=psi_th,
        d_th=d_th,
        area_total=area_total,
        area_vis=area_vis,
        area_ml=area_ml,
        area_sl=area_sl,
    )
