"""Distance laws for the nearest and serving satellite and the three
serving-case probabilities, for the binomial model and its Poisson limit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DegenerateConditioning, DomainError
from .geometry import EarthGeometry, GeometryDerived, surface_areas


class Model(str, Enum):
    EXACT = "exact"
    APPROX = "approx"

    @classmethod
    def coerce(cls, value) -> "Model":
        if isinstance(value, cls):
            return value
        aliases = {"exact_bpp": "exact", "bpp": "exact", "approx_ppp": "approx", "ppp": "approx"}
        try:
            return cls(aliases.get(value, value))
        except ValueError:
            raise DomainError(f"unknown model {value!r}") from None


def void_fraction(kappa, S: int, model) -> np.ndarray:
    """Probability that none of S satellites lies in a cap of fraction ``kappa``."""
    k = np.asarray(kappa, dtype=float)
    if Model.coerce(model) is Model.EXACT:
        with np.errstate(divide="ignore"):
            return np.exp(S * np.log1p(-k))
    return np.exp(-S * k)


def _kappa_clipped(x, geo: EarthGeometry) -> np.ndarray:
    xa = np.asarray(x, dtype=float)
    return np.clip((xa * xa - geo.a**2) / geo.cap_scale, 0.0, 1.0)


def nearest_cdf_value(x, S, geo, model) -> np.ndarray:
    k = _kappa_clipped(x, geo)
    if Model.coerce(model) is Model.EXACT:
        with np.errstate(divide="ignore"):
            return -np.expm1(S * np.log1p(-k))
    return -np.expm1(-S * k)


def nearest_dist(x, S: int, geo: EarthGeometry, model="exact"):
    """(CDF, PDF) of the distance to the nearest satellite."""
    if S < 1:
        raise DomainError(f"S={S!r} < 1")
    model = Model.coerce(model)
    xa = np.asarray(x, dtype=float)
    k = _kappa_clipped(xa, geo)
    cdf = nearest_cdf_value(xa, S, geo, model)
    if model is Model.EXACT:
        with np.errstate(divide="ignore", invalid="ignore"):
            surv = np.where(k < 1.0, np.exp((S - 1) * np.log1p(-k)), 1.0 if S == 1 else 0.0)
    else:
        surv = np.exp(-S * k)
    inside = (xa > geo.a) & (xa <= geo.far_range)
    pdf = np.where(inside, S * xa / (2 * geo.r_e * geo.shell_radius) * surv, 0.0)
    cdf = np.where(xa <= geo.a, 0.0, np.where(xa > geo.far_range, 1.0, cdf))
    if cdf.ndim == 0:
        return float(cdf), float(pdf)
    return cdf, pdf


def serving_ml_dist(x, S: int, derived: GeometryDerived, model="exact"):
    """(CDF, PDF) of the serving distance given main-lobe service."""
    geo = derived.geo
    norm = float(nearest_cdf_value(derived.d_th, S, geo, model))
    if norm <= 0:
        raise DegenerateConditioning("main-lobe region is empty (F_D(d_th) = 0)")
    xa = np.asarray(x, dtype=float)
    cdf, pdf = nearest_dist(xa, S, geo, model)
    inside = (xa > geo.a) & (xa <= derived.d_th)
    cdf = np.where(xa <= geo.a, 0.0, np.where(xa > derived.d_th, 1.0, np.asarray(cdf) / norm))
    pdf = np.where(inside, np.asarray(pdf) / norm, 0.0)
    if cdf.ndim == 0:
        return float(cdf), float(pdf)
    return cdf, pdf


def serving_sl_dist(x, S: int, derived: GeometryDerived, model="exact"):
    """(CDF, PDF) of the serving distance given side-lobe service."""
    geo = derived.geo
    lo = float(nearest_cdf_value(derived.d_th, S, geo, model))
    hi = float(nearest_cdf_value(derived.d_max, S, geo, model))
    # difference of survivals avoids 1 - 1 when both CDFs are near one
    norm = float(
        void_fraction(derived.kappa_th, S, model) - void_fraction(derived.kappa_max, S, model)
    )
    if not hi > lo or norm <= 0:
        raise DegenerateConditioning("side-lobe region is empty (F_D(d_max) <= F_D(d_th))")
    xa = np.asarray(x, dtype=float)
    _, pdf = nearest_dist(xa, S, geo, model)
    surv_x = void_fraction(_kappa_clipped(xa, geo), S, model)
    inside = (xa > derived.d_th) & (xa <= derived.d_max)
    body = (void_fraction(derived.kappa_th, S, model) - surv_x) / norm
    cdf = np.where(xa <= derived.d_th, 0.0, np.where(xa > derived.d_max, 1.0, body))
    pdf = np.where(inside, np.asarray(pdf) / norm, 0.0)
    if cdf.ndim == 0:
        return float(cdf), float(pdf)
    return cdf, pdf


@dataclass(frozen=True)
class CaseProbabilities:
    p_ml: float
    p_sl: float
    p_inv: float
    model: Model

    @property
    def p_vis(self) -> float:
        return 1.0 - self.p_inv


def case_probs_from(derived: GeometryDerived, S: int, model="exact") -> CaseProbabilities:
    model = Model.coerce(model)
    # void probability of the main-lobe cap, (1 + cos psi_th) / 2 = 1 - sin^2(psi_th / 2)
    kappa_ml = math.sin(derived.psi_th / 2.0) ** 2
    kappa_vis = (derived.d_max**2 - derived.geo.a**2) / derived.geo.cap_scale
    void_ml = float(void_fraction(kappa_ml, S, model))
    void_vis = float(void_fraction(kappa_vis, S, model))
    if void_vis > void_ml or derived.psi_th >= derived.psi_max:
        # psi_th clamped to psi_max: both caps coincide up to roundoff
        void_vis = void_ml
    p_ml = 1.0 - void_ml
    return CaseProbabilities(p_ml=p_ml, p_sl=void_ml - void_vis, p_inv=void_vis, model=model)


def case_probs(S: int, geo: EarthGeometry, theta_min: float, omega_th: float, model="exact") -> CaseProbabilities:
    if S < 1:
        raise DomainError(f"S={S!r} < 1")
    return case_probs_from(surface_areas(theta_min, omega_th, geo), S, model)


def visible_probability(S: int, geo: EarthGeometry, theta_min: float, model="exact") -> float:
    from .geometry import max_slant_range

    d = max_slant_range(theta_min, geo)
    return 1.0 - float(void_fraction((d * d - geo.a**2) / geo.cap_scale, S, model))
