"""Shadowed-Rician fading, antenna gains, path loss and SNR thresholds.

The fading CDF series is evaluated in its regularized form. Writing

    K (m)_n delta^n (2b)^(1+n) / (n!)^2 * gamma(1+n, y)
        = NB(n; m, p) * P(1+n, y),      p = 2bm / (2bm + Omega)

with ``P`` the regularized lower incomplete gamma function and ``NB`` the
negative-binomial pmf, the weights sum to one and every term lies in
[0, 1]. Because ``P(1+n, y)`` decreases in ``n``, the truncation error after
``N`` terms is bounded by ``NB.sf(N) * P(N+2, y)``; that bound drives the
adaptive truncation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import ConvergenceNotReached, DomainError

SPEED_OF_LIGHT = 3e8


@dataclass(frozen=True)
class ShadowedRicianParams:
    b: float
    m: float
    omega: float

    def __post_init__(self):
        if not (self.b > 0 and self.m > 0 and self.omega > 0):
            raise DomainError(f"fading parameters must be positive: {self}")

    @property
    def K_const(self) -> float:
        return (2 * self.b * self.m / (2 * self.b * self.m + self.omega)) ** self.m / (2 * self.b)

    @property
    def delta(self) -> float:
        return (self.omega / (2 * self.b * self.m + self.omega)) / (2 * self.b)

    @property
    def ratio(self) -> float:
        """2 b delta, the geometric decay rate of the series (< 1)."""
        return self.omega / (2 * self.b * self.m + self.omega)

    @property
    def nb_success(self) -> float:
        """1 - 2 b delta."""
        return 2 * self.b * self.m / (2 * self.b * self.m + self.omega)

    @property
    def mean(self) -> float:
        return 2 * self.b + self.omega


FADING_PRESETS = {
    "fhs-paper": ShadowedRicianParams(0.063, 0.739, 8.97e4),
    "fhs-canonical": ShadowedRicianParams(0.063, 0.739, 8.97e-4),
    "as": ShadowedRicianParams(0.126, 10.1, 0.835),
    "ils": ShadowedRicianParams(0.158, 19.4, 1.29),
}


@dataclass(frozen=True)
class SeriesControl:
    n_max: int = 4000
    tol: float = 1e-12

    def __post_init__(self):
        if self.n_max < 1 or not self.tol > 0:
            raise DomainError(f"invalid series control {self}")


@dataclass(frozen=True)
class LinkBudget:
    tx_power: float
    f_c: float
    bandwidth: float
    noise_density: float
    g_t_ml: float
    g_t_sl: float
    g_r: float
    rain_gain: float = 1.0
    alpha: float = 2.0

    def __post_init__(self):
        if not self.tx_power > 0:
            raise DomainError("tx_power must be > 0")
        if not (0 < self.rain_gain <= 1):
            raise DomainError("rain gain must lie in (0, 1]")
        if not (self.g_t_ml >= self.g_t_sl > 0):
            raise DomainError("need g_t_ml >= g_t_sl > 0")
        if self.alpha < 2:
            raise DomainError("path-loss exponent must be >= 2")


def lower_inc_gamma(s, x):
    """Non-regularized lower incomplete gamma function."""
    s_arr = np.asarray(s, dtype=float)
    x_arr = np.asarray(x, dtype=float)
    if np.any(s_arr <= 0) or np.any(x_arr < 0):
        raise DomainError("lower_inc_gamma needs s > 0 and x >= 0")
    out = special.gammainc(s_arr, x_arr) * special.gamma(s_arr)
    return float(out) if out.ndim == 0 else out


def series_weights(p: ShadowedRicianParams, n_terms: int) -> np.ndarray:
    """NB(n; m, 1 - 2 b delta) for n = 0 .. n_terms - 1, built in log space."""
    n = np.arange(n_terms, dtype=float)
    logw = (
        p.m * math.log(p.nb_success)
        + special.gammaln(n + p.m)
        - special.gammaln(p.m)
        - special.gammaln(n + 1)
        + n * math.log(p.ratio)
    )
    return np.exp(logw)


def series_tail(p: ShadowedRicianParams, n) -> np.ndarray:
    """Weight mass of the terms strictly after index ``n``."""
    return special.betainc(np.asarray(n, dtype=float) + 1.0, p.m, p.ratio)


def truncation_index(p: ShadowedRicianParams, y_max: float, ctl: SeriesControl) -> int:
    """Smallest N such that dropping the terms n > N costs less than ``ctl.tol``
    for every argument ``y <= y_max`` (``y`` being the gamma argument x / 2b).
    """
    if y_max <= 0:
        return 0
    size = 64
    while True:
        top = min(size, ctl.n_max)
        n = np.arange(top)
        bound = series_tail(p, n) * special.gammainc(n + 2.0, y_max)
        hit = np.nonzero(bound < ctl.tol)[0]
        if hit.size:
            return int(hit[0])
        if top >= ctl.n_max:
            raise ConvergenceNotReached(
                f"fading series needs more than n_max={ctl.n_max} terms "
                f"(tail bound {bound[-1]:.3e} > tol {ctl.tol:.1e})"
            )
        size *= 4


def sr_cdf(x, p: ShadowedRicianParams, ctl: SeriesControl = SeriesControl()):
    """CDF of the shadowed-Rician power gain (scalar or array)."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0):
        raise DomainError("sr_cdf needs x >= 0")
    y = xa / (2 * p.b)
    N = truncation_index(p, float(np.max(y, initial=0.0)), ctl)
    w = series_weights(p, N + 1)
    n = np.arange(N + 1, dtype=float)
    terms = special.gammainc(n + 1.0, y[..., None])
    out = np.clip(terms @ w, 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def sr_sample(p: ShadowedRicianParams, rng: np.random.Generator, size=None):
    """Draw power gains |A e^{i phi} + Z|^2 with Nakagami-m LOS amplitude A."""
    los_power = rng.gamma(p.m, p.omega / p.m, size=size)
    phase = rng.uniform(0.0, 2 * np.pi, size=size)
    amp = np.sqrt(los_power)
    scale = math.sqrt(p.b)
    re = amp * np.cos(phase) + scale * rng.standard_normal(size)
    im = amp * np.sin(phase) + scale * rng.standard_normal(size)
    return re * re + im * im


def tx_gain(omega_s: float, lb: LinkBudget, omega_th: float) -> float:
    if abs(omega_s) > math.pi:
        raise DomainError(f"|omega_s|={abs(omega_s)!r} > pi")
    return lb.g_t_ml if abs(omega_s) <= omega_th else lb.g_t_sl


def vsat_rx_gain(omega_e_deg: float, g_max: float) -> float:
    """VSAT receive gain under a pointing error given in degrees."""
    if not (0.0 <= omega_e_deg < 180.0):
        raise DomainError(f"pointing error {omega_e_deg!r} deg outside [0, 180)")
    if omega_e_deg < 1.0:
        return g_max
    if omega_e_deg < 48.0:
        return 10.0 ** (3.2 - 2.5 * math.log10(omega_e_deg))
    return 0.1


def path_loss(d, lb: LinkBudget):
    d_arr = np.asarray(d, dtype=float)
    if np.any(d_arr <= 0):
        raise DomainError("path_loss needs d > 0")
    out = (SPEED_OF_LIGHT / (4 * math.pi * lb.f_c)) ** 2 * d_arr ** (-lb.alpha)
    return float(out) if out.ndim == 0 else out


def snr_coefficients(R: float, lb: LinkBudget) -> tuple[float, float]:
    """Gain thresholds per unit distance^alpha for main- and side-lobe service.

    Outage occurs when h < w * d**alpha.
    """
    if R < 0:
        raise DomainError(f"rate R={R!r} < 0")
    common = (
        16 * math.pi**2 * lb.f_c**2 * lb.noise_density * lb.bandwidth * math.expm1(R * math.log(2))
        / (lb.tx_power * lb.rain_gain * SPEED_OF_LIGHT**2 * lb.g_r)
    )
    return common / lb.g_t_ml, common / lb.g_t_sl
