"""Outage probability conditioned on at least one visible satellite.

Every evaluation path shares one decomposition: the serving satellite is in
the main-lobe cap with probability ``p_ml``, in the side-lobe annulus with
probability ``p_sl``; within each case the conditional outage is

    P_case = integral F_h(w * x**alpha) f_case(x) dx
           = sum_n NB(n) * integral P(1+n, w x**alpha / 2b) f_case(x) dx

(see :mod:`leo_outage.channel` for the weights ``NB(n)``). The paths differ
in how the per-term integrals are obtained:

* ``outage_exact``: adaptive quadrature after the probability-integral
  substitution u = F_D(x), which makes the integrand bounded and smooth
  for any constellation size;
* ``outage_exact_closed_form``: binomial expansion of (1 - kappa)^(S-1)
  with the integration domain split at t = w a^alpha / 2b. Exact in
  exact arithmetic but cancels badly for large S, so it is restricted to
  small constellations and used as a cross-check;
* ``outage_approx``: Poisson limit with the remaining one-dimensional
  integrals C_ml[n], C_sl[n] done by quadrature;
* ``outage_approx_alpha2``: the same with the C integrals in closed form
  (free-space exponent only);
* ``outage_asymptotic``: the S -> infinity limit, serving distance = a.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import special
from scipy.integrate import quad_vec

from .channel import SeriesControl, series_weights, snr_coefficients, sr_cdf, truncation_index
from .config import SystemConfig
from .distributions import CaseProbabilities, Model, case_probs_from, void_fraction
from .errors import CancellationOverflow, DegenerateConditioning, DomainError, QuadratureFailure

QUAD_EPSABS = 1e-13
QUAD_EPSREL = 1e-12
# quadrature error estimates above this are reported as failures
QUAD_FAIL = 1e-9

S_CLOSED_CAP = 30
CANCELLATION_DECADES = 12.0


class Method(str, Enum):
    EXACT_CLOSED = "exact_closed"
    EXACT_QUADRATURE = "exact_quadrature"
    APPROX = "approx"
    APPROX_ALPHA2 = "approx_alpha2"
    ASYMPTOTIC = "asymptotic"


@dataclass(frozen=True)
class OutageResult:
    p_out: float
    p_out_ml: float
    p_out_sl: float
    n_used: int
    method: Method
    probs: CaseProbabilities


class _Setup:
    """Per-(config, rate) quantities shared by every evaluation path."""

    def __init__(self, cfg: SystemConfig, R: float, model: Model, theta_min: float | None = None):
        if R < 0:
            raise DomainError(f"rate R={R!r} < 0")
        self.cfg = cfg
        self.R = R
        self.model = model
        self.geo = cfg.geo
        self.derived = cfg.derived(theta_min)
        self.S = cfg.S
        self.alpha = cfg.alpha
        self.p = cfg.fading
        self.probs = case_probs_from(self.derived, cfg.S, model)
        if not self.probs.p_ml + self.probs.p_sl > 0:
            raise DegenerateConditioning("no satellite can be visible; outage is undefined")
        self.w1, self.w2 = snr_coefficients(R, cfg.link)
        a, two_b = self.geo.a, 2 * self.p.b
        d_th, d_max = self.derived.d_th, self.derived.d_max
        self.has_ml = self.probs.p_ml > 0
        self.has_sl = self.probs.p_sl > 0
        self.kappa_th = (d_th**2 - a**2) / self.geo.cap_scale
        self.kappa_max = (d_max**2 - a**2) / self.geo.cap_scale
        self.t_a = self.w1 * a**self.alpha / two_b
        self.t1_th = self.w1 * d_th**self.alpha / two_b
        self.t2_th = self.w2 * d_th**self.alpha / two_b
        self.t2_max = self.w2 * d_max**self.alpha / two_b

    @property
    def y_max(self) -> float:
        return max(self.t1_th if self.has_ml else 0.0, self.t2_max if self.has_sl else 0.0)

    def n_terms(self, ctl: SeriesControl) -> int:
        return truncation_index(self.p, self.y_max, ctl) + 1

    def combine(self, p_ml_out: float, p_sl_out: float) -> float:
        pr = self.probs
        total = (pr.p_ml * p_ml_out + pr.p_sl * p_sl_out) / (1.0 - pr.p_inv)
        return min(max(total, 0.0), 1.0)

    def result(self, p_ml_out, p_sl_out, n_used, method) -> OutageResult:
        p_ml_out = min(max(float(p_ml_out), 0.0), 1.0)
        p_sl_out = min(max(float(p_sl_out), 0.0), 1.0)
        return OutageResult(
            p_out=self.combine(p_ml_out, p_sl_out),
            p_out_ml=p_ml_out,
            p_out_sl=p_sl_out,
            n_used=n_used,
            method=method,
            probs=self.probs,
        )


def _zero(setup: _Setup, method: Method) -> OutageResult:
    return setup.result(0.0, 0.0, 0, method)


def _quad(f, lo, hi, what: str) -> np.ndarray:
    if hi <= lo:
        return np.zeros_like(np.atleast_1d(f(lo)))
    res, err = quad_vec(f, lo, hi, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, norm="max", limit=4000)
    if not np.isfinite(err) or err > QUAD_FAIL:
        raise QuadratureFailure(f"{what}: error estimate {err:.3e} exceeds {QUAD_FAIL:.0e}")
    return np.asarray(res)


# ------------------------------------------------------------------ exact, quadrature


def _kappa_from_cdf(u, S, model):
    """Cap fraction at which the nearest-distance CDF equals ``u``."""
    if model is Model.EXACT:
        return -np.expm1(np.log1p(-u) / S)
    return -np.log1p(-u) / S


def _kappa_from_survival(v, S, model):
    with np.errstate(divide="ignore"):
        lv = np.log(v)
    if model is Model.EXACT:
        return -np.expm1(lv / S)
    return -lv / S


def conditional_term_integrals(setup: _Setup, n_terms: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-term conditional outage integrals  int P(1+n, w x^alpha / 2b) f_case(x) dx.

    Integrates over the nearest-distance CDF so the weight becomes uniform.
    Works for either distance model (``setup.model``).
    """
    S, model, geo, p = setup.S, setup.model, setup.geo, setup.p
    n = np.arange(n_terms, dtype=float)
    scale = geo.cap_scale
    a2 = geo.a**2
    half_alpha = setup.alpha / 2.0

    def y_of_kappa(kappa, w):
        x2 = a2 + scale * kappa
        return w * x2**half_alpha / (2 * p.b)

    I_ml = np.zeros(n_terms)
    I_sl = np.zeros(n_terms)
    if setup.has_ml:
        v_th = float(void_fraction(setup.kappa_th, S, model))
        f_th = -math.expm1(S * math.log1p(-setup.kappa_th)) if model is Model.EXACT else -math.expm1(-S * setup.kappa_th)

        def f_ml(s):
            kappa = min(_kappa_from_cdf(s * f_th, S, model), setup.kappa_th)
            return special.gammainc(n + 1.0, y_of_kappa(kappa, setup.w1))

        I_ml = _quad(f_ml, 0.0, 1.0, "main-lobe outage integral")
    if setup.has_sl:
        v_th = float(void_fraction(setup.kappa_th, S, model))
        v_max = float(void_fraction(setup.kappa_max, S, model))
        span = v_th - v_max

        def f_sl(s):
            v = v_th - s * span
            kappa = setup.kappa_max if v <= 0 else min(max(_kappa_from_survival(v, S, model), setup.kappa_th), setup.kappa_max)
            return special.gammainc(n + 1.0, y_of_kappa(kappa, setup.w2))

        I_sl = _quad(f_sl, 0.0, 1.0, "side-lobe outage integral")
    return I_ml, I_sl


def outage_exact(cfg: SystemConfig, R: float, ctl: SeriesControl = SeriesControl(), theta_min: float | None = None) -> OutageResult:
    """Exact (binomial point process) outage by per-term adaptive quadrature."""
    setup = _Setup(cfg, R, Model.EXACT, theta_min)
    if R == 0:
        return _zero(setup, Method.EXACT_QUADRATURE)
    n_terms = setup.n_terms(ctl)
    w = series_weights(setup.p, n_terms)
    I_ml, I_sl = conditional_term_integrals(setup, n_terms)
    return setup.result(w @ I_ml, w @ I_sl, n_terms, Method.EXACT_QUADRATURE)


# ------------------------------------------------------------------ exact, closed form


def _gammainc_diff(s, lo, hi):
    """P(s, hi) - P(s, lo) for hi >= lo, switching to the upper function when both are near one."""
    s = np.asarray(s, dtype=float)
    use_upper = lo > s
    upper = special.gammaincc(s, lo) - special.gammaincc(s, hi)
    lower = special.gammainc(s, hi) - special.gammainc(s, lo)
    return np.where(use_upper, upper, lower)


def _closed_form_case(setup: _Setup, w_coef: float, lo: float, hi: float, norm: float, n_terms: int):
    """Binomial-expansion evaluation of one conditional case over [lo, hi].

    Returns (value, cancellation_decades).
    """
    S, geo, p, alpha = setup.S, setup.geo, setup.p, setup.alpha
    L = geo.far_range
    weights = series_weights(p, n_terms)
    t_lo = w_coef * lo**alpha / (2 * p.b)
    t_hi = w_coef * hi**alpha / (2 * p.b)
    x1 = (2 * p.b / w_coef) ** (1.0 / alpha)
    lo_n, hi_n, x1_n = lo / L, hi / L, x1 / L
    n = np.arange(n_terms, dtype=float)
    with np.errstate(divide="ignore"):
        log_w = np.log(weights)
        log_hi = log_w + np.log(special.gammainc(n + 1.0, t_hi))
        log_lo = log_w + np.log(special.gammainc(n + 1.0, t_lo))
    lg_n = special.gammaln(n + 1.0)
    pieces: list[float] = []
    for k in range(S):
        e = 2 * k + 2
        s_k = e / alpha
        sign = -1.0 if k % 2 else 1.0
        # log of C(S-1, k) / e; the coefficient itself overflows for large S
        log_binom = special.gammaln(S) - special.gammaln(k + 1.0) - special.gammaln(S - k) - math.log(e)
        diff = _gammainc_diff(n + 1.0 + s_k, t_lo, t_hi)
        with np.errstate(divide="ignore"):
            log_third = log_w + e * math.log(x1_n) + special.gammaln(n + 1.0 + s_k) - lg_n + np.log(diff)
        for log_mag, sgn in ((log_hi + e * math.log(hi_n), sign), (log_lo + e * math.log(lo_n), -sign), (log_third, -sign)):
            log_mag = log_binom + log_mag
            if np.max(log_mag) > 700.0:
                raise CancellationOverflow(f"closed-form term magnitudes exceed double range at S={S}")
            pieces.extend((sgn * np.exp(log_mag)).tolist())
    prefactor = 2.0 * S * math.exp(S * math.log(L * L / geo.cap_scale)) / norm
    total = math.fsum(pieces)
    biggest = max(abs(x) for x in pieces)
    if total <= 0 or biggest == 0:
        decades = math.inf if biggest > 0 else 0.0
    else:
        decades = math.log10(biggest / abs(total))
    return prefactor * total, decades


def outage_exact_closed_form(
    cfg: SystemConfig,
    R: float,
    ctl: SeriesControl = SeriesControl(),
    s_cap: int = S_CLOSED_CAP,
    theta_min: float | None = None,
) -> OutageResult:
    """Exact outage from the binomial-expansion closed form (small S only).

    Raises CancellationOverflow when S exceeds ``s_cap`` or the measured
    cancellation exceeds the double-precision budget.
    """
    if cfg.S > s_cap:
        raise CancellationOverflow(
            f"S={cfg.S} exceeds the closed-form cap {s_cap}: the alternating binomial sum "
            "is not trusted in double precision; use the quadrature path"
        )
    setup = _Setup(cfg, R, Model.EXACT, theta_min)
    if R == 0:
        return _zero(setup, Method.EXACT_CLOSED)
    n_terms = setup.n_terms(ctl)
    S, geo = setup.S, setup.geo
    d = setup.derived
    p_ml_out = p_sl_out = 0.0
    worst = 0.0
    if setup.has_ml:
        f_th = -math.expm1(S * math.log1p(-setup.kappa_th))
        p_ml_out, dec = _closed_form_case(setup, setup.w1, geo.a, d.d_th, f_th, n_terms)
        worst = max(worst, dec)
    if setup.has_sl:
        span = float(void_fraction(setup.kappa_th, S, "exact") - void_fraction(setup.kappa_max, S, "exact"))
        p_sl_out, dec = _closed_form_case(setup, setup.w2, d.d_th, d.d_max, span, n_terms)
        worst = max(worst, dec)
    if worst > CANCELLATION_DECADES:
        raise CancellationOverflow(
            f"closed form cancels over {worst:.1f} decades (budget {CANCELLATION_DECADES:.0f})"
        )
    return setup.result(p_ml_out, p_sl_out, n_terms, Method.EXACT_CLOSED)


# ------------------------------------------------------------------ approximation


def _c_integrals(setup: _Setup, n_terms: int):
    """Per-term C_ml[n], C_sl[n] divided by n! and with the e^{S a^2 / cap} factor folded in."""
    S, geo, p, alpha = setup.S, setup.geo, setup.p, setup.alpha
    n = np.arange(n_terms, dtype=float)
    lg = special.gammaln(n + 1.0)
    scale, a2 = geo.cap_scale, geo.a**2

    def make(w_coef, t_lo):
        def f(u):
            t = t_lo + u
            x2 = (2 * p.b * t / w_coef) ** (2.0 / alpha)
            return np.exp(n * math.log(t) - t - lg - S * (x2 - a2) / scale)

        return f

    C_ml = np.zeros(n_terms)
    C_sl = np.zeros(n_terms)
    if setup.has_ml and setup.t1_th > setup.t_a:
        C_ml = _quad(make(setup.w1, setup.t_a), 0.0, setup.t1_th - setup.t_a, "C_ml integral")
    if setup.has_sl and setup.t2_max > setup.t2_th:
        C_sl = _quad(make(setup.w2, setup.t2_th), 0.0, setup.t2_max - setup.t2_th, "C_sl integral")
    return C_ml, C_sl


def _c_integrals_alpha2(setup: _Setup, n_terms: int):
    S, geo, p = setup.S, setup.geo, setup.p
    n = np.arange(n_terms, dtype=float)
    shift = S * geo.a**2 / geo.cap_scale
    C_ml = np.zeros(n_terms)
    C_sl = np.zeros(n_terms)
    if setup.has_ml:
        w3 = 1.0 + 2.0 * S * p.b / (setup.w1 * geo.cap_scale)
        diff = _gammainc_diff(n + 1.0, w3 * setup.t_a, w3 * setup.t1_th)
        C_ml = np.exp(shift - (n + 1.0) * math.log(w3)) * diff
    if setup.has_sl:
        w4 = 1.0 + 2.0 * S * p.b / (setup.w2 * geo.cap_scale)
        diff = _gammainc_diff(n + 1.0, w4 * setup.t2_th, w4 * setup.t2_max)
        C_sl = np.exp(shift - (n + 1.0) * math.log(w4)) * diff
    return C_ml, C_sl


def approx_term_contributions(setup: _Setup, n_terms: int, closed_c: bool):
    """Weighted per-term contributions to the approximated conditional outages.

    Summing the first N+1 entries gives the N-truncated series.
    """
    S, p = setup.S, setup.p
    n = np.arange(n_terms, dtype=float)
    w = series_weights(p, n_terms)
    C_ml, C_sl = (_c_integrals_alpha2 if closed_c else _c_integrals)(setup, n_terms)
    v_th = math.exp(-S * setup.kappa_th)
    v_max = math.exp(-S * setup.kappa_max)
    terms_ml = np.zeros(n_terms)
    terms_sl = np.zeros(n_terms)
    if setup.has_ml:
        bracket = C_ml + special.gammainc(n + 1.0, setup.t_a) - v_th * special.gammainc(n + 1.0, setup.t1_th)
        terms_ml = w * bracket / -math.expm1(-S * setup.kappa_th)
    if setup.has_sl:
        bracket = C_sl + v_th * special.gammainc(n + 1.0, setup.t2_th) - v_max * special.gammainc(n + 1.0, setup.t2_max)
        terms_sl = w * bracket / (v_th - v_max)
    return terms_ml, terms_sl


def _approx(cfg, R, ctl, theta_min, closed_c: bool, method: Method) -> OutageResult:
    setup = _Setup(cfg, R, Model.APPROX, theta_min)
    if R == 0:
        return _zero(setup, method)
    n_terms = setup.n_terms(ctl)
    terms_ml, terms_sl = approx_term_contributions(setup, n_terms, closed_c)
    return setup.result(math.fsum(terms_ml), math.fsum(terms_sl), n_terms, method)


def outage_approx(cfg: SystemConfig, R: float, ctl: SeriesControl = SeriesControl(), theta_min: float | None = None) -> OutageResult:
    """Poisson-limit outage with the C integrals evaluated numerically (any alpha)."""
    return _approx(cfg, R, ctl, theta_min, closed_c=False, method=Method.APPROX)


def outage_approx_alpha2(cfg: SystemConfig, R: float, ctl: SeriesControl = SeriesControl(), theta_min: float | None = None) -> OutageResult:
    """Poisson-limit outage with closed-form C integrals; free-space exponent only."""
    if cfg.alpha != 2:
        raise DomainError(f"closed-form C integrals need alpha = 2, got {cfg.alpha}")
    return _approx(cfg, R, ctl, theta_min, closed_c=True, method=Method.APPROX_ALPHA2)


def outage_asymptotic(cfg: SystemConfig, R: float, ctl: SeriesControl = SeriesControl()) -> float:
    """Limit S -> infinity: outage of a main-lobe link at the nadir distance."""
    w1, _ = snr_coefficients(R, cfg.link)
    return sr_cdf(w1 * cfg.a**cfg.alpha, cfg.fading, ctl)


def series_increment(N: int, cfg: SystemConfig, R: float, theta_min: float | None = None) -> tuple[float, float, float]:
    """Change of the approximated outage when the fading series grows from N to N+1 terms.

    Returns (delta_ml, delta_sl, delta), delta being the case-weighted sum.
    """
    if N < 1:
        raise DomainError(f"N={N!r} < 1")
    setup = _Setup(cfg, R, Model.APPROX, theta_min)
    if R == 0:
        return 0.0, 0.0, 0.0
    terms_ml, terms_sl = approx_term_contributions(setup, N + 1, closed_c=cfg.alpha == 2)
    d_ml, d_sl = float(terms_ml[N]), float(terms_sl[N])
    pr = setup.probs
    delta = (pr.p_ml * d_ml + pr.p_sl * d_sl) / (1.0 - pr.p_inv)
    return d_ml, d_sl, delta


def truncated_outage_approx(N: int, cfg: SystemConfig, R: float, theta_min: float | None = None) -> float:
    """Approximated outage with the fading series cut after index N (terms 0..N)."""
    setup = _Setup(cfg, R, Model.APPROX, theta_min)
    if R == 0:
        return 0.0
    terms_ml, terms_sl = approx_term_contributions(setup, N + 1, closed_c=cfg.alpha == 2)
    pr = setup.probs
    return (pr.p_ml * math.fsum(terms_ml) + pr.p_sl * math.fsum(terms_sl)) / (1.0 - pr.p_inv)


def outage(cfg: SystemConfig, R: float, ctl: SeriesControl = SeriesControl(), model=None, theta_min: float | None = None) -> OutageResult:
    """Model dispatcher used by the throughput/optimizer layer.

    The approximated model takes the closed-form C integrals whenever alpha = 2.
    """
    model = Model.coerce(model if model is not None else cfg.model)
    if model is Model.EXACT:
        return outage_exact(cfg, R, ctl, theta_min)
    if cfg.alpha == 2:
        return outage_approx_alpha2(cfg, R, ctl, theta_min)
    return outage_approx(cfg, R, ctl, theta_min)
