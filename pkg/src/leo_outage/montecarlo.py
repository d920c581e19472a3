"""Monte-Carlo oracle: satellites dropped uniformly on the shell, the
nearest visible one serves, shadowed-Rician gains decide outage.

Only polar angles are sampled (the terminal sits at the pole, azimuth
never matters). Trials are split into fixed-size chunks; chunk ``k`` draws
from ``default_rng([seed, k])`` so results do not depend on how many
workers run the chunks.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .channel import snr_coefficients, sr_sample
from .config import SystemConfig
from .errors import DomainError
from .geometry import EarthGeometry, GeometryDerived

DEFAULT_SEED = 20240917
SEED_ENV = "LEO_MC_SEED"
# satellites per sub-block when reducing to the nearest one
_SAT_BLOCK = 256


class Conditioning(str, Enum):
    UNCONDITIONAL = "unconditional"
    VISIBLE_ONLY = "visible_only"


class Case(str, Enum):
    ML = "ml"
    SL = "sl"
    INVISIBLE = "invisible"


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw.strip() == "":
        return DEFAULT_SEED
    try:
        return int(raw, 10)
    except ValueError:
        raise DomainError(f"{SEED_ENV}={raw!r} is not a decimal integer") from None


@dataclass(frozen=True)
class TrialConfig:
    """``trials`` counts raw draws; ``target_used`` instead keeps drawing chunks
    until that many conditioned trials are in hand."""

    trials: int = 100_000
    seed: int | None = None
    chunk_size: int = 20_000
    conditioning: Conditioning = Conditioning.VISIBLE_ONLY
    target_used: int | None = None
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1 or self.chunk_size < 1 or self.workers < 1:
            raise DomainError("trials, chunk_size and workers must be >= 1")
        if self.target_used is not None and self.target_used < 1:
            raise DomainError("target_used must be >= 1")
        object.__setattr__(self, "conditioning", Conditioning(self.conditioning))

    @property
    def resolved_seed(self) -> int:
        return self.seed if self.seed is not None else default_seed()


@dataclass(frozen=True)
class McEstimate:
    mean: float
    stderr: float
    trials_used: int
    trials_discarded: int


def _binomial(hits: int, used: int, discarded: int, scale: float = 1.0) -> McEstimate:
    if used == 0:
        return McEstimate(math.nan, math.nan, 0, discarded)
    p = hits / used
    return McEstimate(scale * p, scale * math.sqrt(p * (1.0 - p) / used), used, discarded)


def sample_constellation(S: int, rng: np.random.Generator, size=None) -> np.ndarray:
    """Polar angles of S satellites placed uniformly on the shell."""
    if S < 1:
        raise DomainError(f"S={S!r} < 1")
    shape = (S,) if size is None else (*np.atleast_1d(size), S)
    return np.arccos(rng.uniform(-1.0, 1.0, size=shape))


def distance_from_cos(cos_psi, geo: EarthGeometry):
    r_e, rs = geo.r_e, geo.shell_radius
    # (r_e - rs)^2 + 2 r_e rs (1 - cos) keeps precision near the nadir
    return np.sqrt(geo.a**2 + 2.0 * r_e * rs * (1.0 - np.asarray(cos_psi)))


def nearest_cos(S: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """Largest cos(psi) over S satellites, for n independent constellations."""
    best = np.full(n, -np.inf)
    left = S
    while left > 0:
        k = min(left, _SAT_BLOCK)
        u = rng.uniform(-1.0, 1.0, size=(n, k))
        np.maximum(best, u.max(axis=1), out=best)
        left -= k
    return best


def sample_nearest_distance(S: int, geo: EarthGeometry, n: int, seed: int | None = None, chunk_size: int = 20_000) -> np.ndarray:
    """Distances to the nearest of S uniform satellites, n constellations."""
    seed = default_seed() if seed is None else seed
    out = []
    for k, start in enumerate(range(0, n, chunk_size)):
        rng = np.random.default_rng([seed, k])
        out.append(distance_from_cos(nearest_cos(S, min(chunk_size, n - start), rng), geo))
    return np.concatenate(out)


def classify_case(constellation, derived: GeometryDerived) -> Case:
    """Serving case of one constellation given as polar angles."""
    psi = np.asarray(constellation, dtype=float)
    d = float(distance_from_cos(np.cos(psi.min()), derived.geo))
    return _case_of_distance(d, derived)


def _case_of_distance(d: float, derived: GeometryDerived) -> Case:
    if d > derived.d_max:
        return Case.INVISIBLE
    if d <= derived.d_th:
        return Case.ML
    return Case.SL


def _chunk_sizes(trials: int, chunk: int):
    full, rest = divmod(trials, chunk)
    return [chunk] * full + ([rest] if rest else [])


def _run_chunks(fn, trial_cfg: TrialConfig, counted) -> np.ndarray:
    """Sum integer count vectors over chunks in index order.

    ``fn(rng, n)`` returns counts for ``n`` raw trials; ``counted(c)`` gives
    the conditioned-trial count so ``target_used`` can stop the run.
    """
    seed = trial_cfg.resolved_seed

    def job(k, n):
        return fn(np.random.default_rng([seed, k]), n)

    pool = ThreadPoolExecutor(trial_cfg.workers) if trial_cfg.workers > 1 else None
    try:
        if trial_cfg.target_used is None:
            sizes = _chunk_sizes(trial_cfg.trials, trial_cfg.chunk_size)
            if pool:
                parts = list(pool.map(job, range(len(sizes)), sizes))
            else:
                parts = [job(k, n) for k, n in enumerate(sizes)]
            return np.sum(parts, axis=0)
        total = None
        k = 0
        batch = trial_cfg.workers
        while True:
            idx = range(k, k + batch)
            sizes = [trial_cfg.chunk_size] * batch
            parts = list(pool.map(job, idx, sizes)) if pool else [job(i, n) for i, n in zip(idx, sizes)]
            for c in parts:
                total = c if total is None else total + c
                k += 1
                if counted(total) >= trial_cfg.target_used:
                    return total
    finally:
        if pool:
            pool.shutdown()


def _case_counts(S: int, derived: GeometryDerived):
    def fn(rng, n):
        d = distance_from_cos(nearest_cos(S, n, rng), derived.geo)
        ml = int(np.count_nonzero(d <= derived.d_th))
        vis = int(np.count_nonzero(d <= derived.d_max))
        return np.array([ml, vis - ml, n - vis], dtype=np.int64)

    return fn


def estimate_case_probs(S: int, derived: GeometryDerived, trial_cfg: TrialConfig) -> dict[str, McEstimate]:
    """Frequencies of main-lobe, side-lobe and invisible service (unconditional)."""
    counts = _run_chunks(_case_counts(S, derived), trial_cfg, lambda c: int(c.sum()))
    n = int(counts.sum())
    return {case.value: _binomial(int(counts[i]), n, 0) for i, case in enumerate(Case)}


def estimate_visibility(cfg: SystemConfig, trial_cfg: TrialConfig, theta_min: float | None = None) -> McEstimate:
    counts = _run_chunks(_case_counts(cfg.S, cfg.derived(theta_min)), trial_cfg, lambda c: int(c.sum()))
    n = int(counts.sum())
    return _binomial(int(counts[0] + counts[1]), n, 0)


def _outage_counts(cfg: SystemConfig, R: float, derived: GeometryDerived):
    w1, w2 = snr_coefficients(R, cfg.link)
    alpha = cfg.alpha

    def fn(rng, n):
        d = distance_from_cos(nearest_cos(cfg.S, n, rng), derived.geo)
        h = sr_sample(cfg.fading, rng, size=n)
        visible = d <= derived.d_max
        w = np.where(d <= derived.d_th, w1, w2)
        out = visible & (h < w * d**alpha)
        return np.array([int(np.count_nonzero(out)), int(np.count_nonzero(visible)), n], dtype=np.int64)

    return fn


def estimate_outage(cfg: SystemConfig, R: float, trial_cfg: TrialConfig = TrialConfig(), theta_min: float | None = None) -> McEstimate:
    """Outage frequency among trials with a visible satellite.

    Invisible trials are discarded under ``visible_only`` and counted as
    non-outage denominators under ``unconditional``.
    """
    if R < 0:
        raise DomainError(f"rate R={R!r} < 0")
    derived = cfg.derived(theta_min)
    counts = _run_chunks(_outage_counts(cfg, R, derived), trial_cfg, lambda c: int(c[1]))
    hits, vis, n = (int(x) for x in counts)
    if trial_cfg.conditioning is Conditioning.VISIBLE_ONLY:
        return _binomial(hits, vis, n - vis)
    return _binomial(hits, n, 0)


def estimate_throughput(cfg: SystemConfig, R: float, theta: float | None = None, trial_cfg: TrialConfig = TrialConfig()) -> McEstimate:
    """Mean delivered rate: R on trials that see a satellite and avoid outage."""
    if R < 0:
        raise DomainError(f"rate R={R!r} < 0")
    derived = cfg.derived(theta)
    counts = _run_chunks(_outage_counts(cfg, R, derived), trial_cfg, lambda c: int(c[2]))
    hits, vis, n = (int(x) for x in counts)
    return _binomial(vis - hits, n, 0, scale=R)
