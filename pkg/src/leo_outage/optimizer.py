"""Throughput T = P_vis (1 - P_out) R and its maximization over (R, theta_min)
subject to P_vis >= eta and P_out <= eps.

Two solvers: an alternating scheme (rate step, then elevation step, each a
grid scan refined by golden-section search) and a plain 2-D grid scan used
as its reference.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from scipy.optimize import brentq

from .channel import SeriesControl
from .config import SystemConfig
from .distributions import Model, case_probs_from
from .errors import (
    DegenerateConditioning,
    DomainError,
    InfeasibleRate,
    InfeasibleVisibility,
    IterationCapReached,
    NoFeasiblePoint,
)
from .geometry import min_elevation_from_range
from .outage import outage

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
HALF_PI = math.pi / 2.0
# grid cells within this of the best are treated as ties
TIE_TOL = 1e-12
# outage excess tolerated when a rate sits on its own root (R = R_max)
ROOT_SLACK = 1e-9


@dataclass(frozen=True)
class OptConstraints:
    eta: float = 0.9
    epsilon: float = 0.1
    delta_r: float = 0.01
    delta_theta: float = math.radians(0.1)
    r_hat: float = 10.0
    max_iters: int = 50

    def __post_init__(self):
        if not (0 < self.eta < 1 and 0 < self.epsilon < 1):
            raise DomainError("eta and epsilon must lie in (0, 1)")
        if not (self.delta_r > 0 and self.delta_theta > 0 and self.r_hat > 0 and self.max_iters >= 1):
            raise DomainError("steps, r_hat and max_iters must be positive")


@dataclass(frozen=True)
class OptResult:
    r_star: float
    theta_star: float
    throughput: float
    iterations: int
    trace: list = field(default_factory=list)
    method: str = "iterative"


def _model(cfg, model):
    return Model.coerce(model if model is not None else cfg.model)


def visible_prob(theta_min: float, cfg: SystemConfig, model=None) -> float:
    return case_probs_from(cfg.derived(theta_min), cfg.S, _model(cfg, model)).p_vis


def outage_at(R: float, theta_min: float, cfg: SystemConfig, ctl=SeriesControl(), model=None) -> float:
    return outage(cfg, R, ctl, model=_model(cfg, model), theta_min=theta_min).p_out


def throughput(R: float, theta_min: float, cfg: SystemConfig, ctl: SeriesControl = SeriesControl(), model=None) -> float:
    """Delivered rate in bps/Hz; zero when no satellite can be visible."""
    if R < 0:
        raise DomainError(f"rate R={R!r} < 0")
    if R == 0:
        return 0.0
    model = _model(cfg, model)
    p_vis = visible_prob(theta_min, cfg, model)
    if p_vis <= 0:
        return 0.0
    return p_vis * (1.0 - outage_at(R, theta_min, cfg, ctl, model)) * R


def theta_upper_bound(cfg: SystemConfig, eta: float, model=None) -> float:
    """Largest elevation mask keeping P_vis >= eta."""
    if not 0 < eta < 1:
        raise DomainError(f"eta={eta!r} outside (0, 1)")
    model = _model(cfg, model)
    geo = cfg.geo
    if model is Model.EXACT:
        kappa = -math.expm1(math.log1p(-eta) / cfg.S)
    else:
        kappa = -math.log1p(-eta) / cfg.S
    d = math.sqrt(geo.a**2 + geo.cap_scale * kappa)
    if d > geo.horizon_range * (1 + 1e-12):
        raise InfeasibleVisibility(
            f"P_vis >= {eta} is unreachable for S={cfg.S}, a={geo.a / 1e3:g} km even at zero elevation"
        )
    d = min(max(d, geo.a), geo.horizon_range)
    return min(max(min_elevation_from_range(d, geo), 0.0), HALF_PI)


def rmax_given_theta(theta: float, cfg: SystemConfig, epsilon: float, ctl: SeriesControl = SeriesControl(), model=None) -> float:
    """Rate at which the outage reaches ``epsilon`` for elevation mask ``theta``."""

    def f(R):
        return outage_at(R, theta, cfg, ctl, model) - epsilon

    hi = 1.0
    while f(hi) <= 0:
        hi *= 2.0
        if hi > 1e6:
            raise InfeasibleRate(f"outage stays below {epsilon} up to R={hi:g}")
    return brentq(f, 0.0, hi, xtol=1e-13, rtol=1e-14, maxiter=500)


def theta0_given_r(
    R: float,
    cfg: SystemConfig,
    epsilon: float,
    ctl: SeriesControl = SeriesControl(),
    model=None,
    theta_hi: float | None = None,
) -> float:
    """Smallest elevation mask meeting the outage cap at rate ``R``.

    ``theta_hi`` bounds the search (the visibility bound in the optimizer);
    by default it sits just below zenith where visibility vanishes.
    """
    if R == 0:
        return 0.0
    hi = theta_hi if theta_hi is not None else HALF_PI * (1 - 1e-9)

    def f(theta):
        return outage_at(R, theta, cfg, ctl, model) - epsilon

    if f(0.0) <= 0:
        return 0.0
    try:
        f_hi = f(hi)
    except DegenerateConditioning:
        raise InfeasibleRate(f"R={R:g}: no visible satellite at theta={math.degrees(hi):g} deg") from None
    if f_hi > ROOT_SLACK:
        raise InfeasibleRate(f"R={R:g} violates P_out <= {epsilon} for every theta <= {math.degrees(hi):g} deg")
    if f_hi > 0:
        return hi
    return brentq(f, 0.0, hi, xtol=1e-12, rtol=1e-14, maxiter=500)


def golden_max(f, lo: float, hi: float, tol: float = 1e-9, max_iter: int = 200) -> tuple[float, float]:
    """Maximize a unimodal ``f`` on [lo, hi]; returns (x, f(x)) with the best point seen,
    endpoints included."""
    best_x, best_f = lo, f(lo)
    f_hi = f(hi)
    if f_hi > best_f:
        best_x, best_f = hi, f_hi
    a, b = lo, hi
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    for x, fx in ((c, fc), (d, fd)):
        if fx > best_f:
            best_x, best_f = x, fx
    return best_x, best_f


def _grid_then_golden(f, lo: float, hi: float, step: float, tol: float) -> tuple[float, float]:
    if hi <= lo:
        return lo, f(lo)
    n = max(int(math.floor((hi - lo) / step)), 1)
    xs = [lo + i * (hi - lo) / n for i in range(n + 1)]
    vals = [f(x) for x in xs]
    j = max(range(len(xs)), key=lambda i: (vals[i], -i))
    left = xs[max(j - 1, 0)]
    right = xs[min(j + 1, n)]
    x, fx = golden_max(f, left, right, tol=tol)
    if vals[j] >= fx:
        return xs[j], vals[j]
    return x, fx


def optimize_iterative(
    cfg: SystemConfig,
    constraints: OptConstraints = OptConstraints(),
    ctl: SeriesControl = SeriesControl(),
    model=None,
) -> OptResult:
    """Alternate rate and elevation-mask maximizations until T stops improving."""
    model = _model(cfg, model)
    eps = constraints.epsilon
    mu = theta_upper_bound(cfg, constraints.eta, model)

    def T(R, theta):
        return throughput(R, theta, cfg, ctl, model)

    theta = mu
    best = (0.0, theta, 0.0)
    trace = []
    t_max = -math.inf
    for it in range(1, constraints.max_iters + 1):
        r_max = rmax_given_theta(theta, cfg, eps, ctl, model)
        R, _ = _grid_then_golden(lambda r: T(r, theta), 0.0, r_max, constraints.delta_r, 1e-9)
        theta0 = theta0_given_r(R, cfg, eps, ctl, model, theta_hi=mu)
        theta, t_hat = _grid_then_golden(lambda th: T(R, th), theta0, mu, constraints.delta_theta, 1e-10)
        trace.append((R, theta, t_hat))
        if t_hat > best[2]:
            best = (R, theta, t_hat)
        if not t_hat > t_max + 1e-9:
            return OptResult(best[0], best[1], best[2], it, trace, "iterative")
        t_max = t_hat
    result = OptResult(best[0], best[1], best[2], constraints.max_iters, trace, "iterative")
    raise IterationCapReached(f"throughput still improving after {constraints.max_iters} iterations", result)


def optimize_exhaustive(
    cfg: SystemConfig,
    constraints: OptConstraints = OptConstraints(),
    ctl: SeriesControl = SeriesControl(),
    model=None,
) -> OptResult:
    """Grid argmax of T over feasible cells, scanning theta first then R.

    Visibility falls with theta, so the scan ends at the first mask below
    the floor. Along R the outage is
    monotone, so the scan for a given theta stops at the first cell above
    the outage cap. Ties go to the smaller theta, then the smaller R.
    """
    model = _model(cfg, model)
    c = constraints
    n_theta = int(math.floor(HALF_PI / c.delta_theta + 1e-9))
    n_r = int(math.floor(c.r_hat / c.delta_r + 1e-9))
    best = None
    cells = 0
    for j in range(n_theta + 1):
        theta = j * c.delta_theta
        p_vis = visible_prob(theta, cfg, model)
        if p_vis < c.eta:
            # visibility only shrinks as the mask rises
            break
        for i in range(1, n_r + 1):
            R = i * c.delta_r
            cells += 1
            p_out = outage_at(R, theta, cfg, ctl, model)
            if p_out > c.epsilon:
                break
            t = p_vis * (1.0 - p_out) * R
            if best is None or t > best[2] + TIE_TOL:
                best = (R, theta, t)
    if best is None:
        raise NoFeasiblePoint("no grid cell satisfies both constraints")
    return OptResult(best[0], best[1], best[2], cells, [best], "exhaustive")
