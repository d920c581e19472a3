import math

import numpy as np
import pytest
from scipy import stats

from leo_outage.config import PRESETS
from leo_outage.distributions import case_probs_from, nearest_dist
from leo_outage.errors import DomainError
from leo_outage.montecarlo import (
    DEFAULT_SEED,
    SEED_ENV,
    Case,
    Conditioning,
    TrialConfig,
    classify_case,
    default_seed,
    distance_from_cos,
    estimate_case_probs,
    estimate_outage,
    estimate_throughput,
    estimate_visibility,
    nearest_cos,
    sample_constellation,
    sample_nearest_distance,
)
from leo_outage.optimizer import throughput
from leo_outage.outage import outage_exact

VSAT = PRESETS["vsat-table1"]
HAND = PRESETS["handheld-table1"].with_(fading="ils")


def test_seed_env(monkeypatch):
    monkeypatch.delenv(SEED_ENV, raising=False)
    assert default_seed() == DEFAULT_SEED
    monkeypatch.setenv(SEED_ENV, "17")
    assert default_seed() == 17
    assert TrialConfig().resolved_seed == 17
    assert TrialConfig(seed=3).resolved_seed == 3
    monkeypatch.setenv(SEED_ENV, "x")
    with pytest.raises(DomainError):
        default_seed()


def test_trial_config_validation():
    with pytest.raises(DomainError):
        TrialConfig(trials=0)
    with pytest.raises(DomainError):
        TrialConfig(target_used=0)
    assert TrialConfig(conditioning="unconditional").conditioning is Conditioning.UNCONDITIONAL


def test_constellation_uniform_on_sphere():
    rng = np.random.default_rng(1)
    psi = sample_constellation(50, rng, size=400).ravel()
    # cos(psi) is uniform on [-1, 1] for uniform points on a sphere
    p = stats.kstest(np.cos(psi), "uniform", args=(-1.0, 2.0)).pvalue
    assert p > 1e-3
    counts, _ = np.histogram(np.cos(psi), bins=20, range=(-1, 1))
    assert stats.chisquare(counts).pvalue > 1e-3


def test_nearest_cos_is_max_of_uniforms():
    rng = np.random.default_rng(2)
    c = nearest_cos(7, 50_000, rng)
    # P(max <= t) = ((1 + t) / 2)^7
    p = stats.kstest(c, lambda t: ((1 + np.clip(t, -1, 1)) / 2) ** 7).pvalue
    assert p > 1e-3


def test_nearest_cos_blocks_exceeding_block_size():
    c = nearest_cos(600, 20_000, np.random.default_rng(3))
    p = stats.kstest(c, lambda t: ((1 + np.clip(t, -1, 1)) / 2) ** 600).pvalue
    assert p > 1e-3


def test_distance_from_cos_endpoints():
    geo = VSAT.geo
    assert distance_from_cos(1.0, geo) == pytest.approx(geo.a, rel=1e-15)
    assert distance_from_cos(-1.0, geo) == pytest.approx(2 * geo.r_e + geo.a, rel=1e-12)


def test_sampled_distance_matches_cdf():
    geo = VSAT.geo
    d = sample_nearest_distance(10, geo, 50_000, seed=5)
    cdf = lambda x: nearest_dist(np.atleast_1d(x), 10, geo, "exact")[0]
    assert stats.kstest(d, cdf).pvalue > 1e-3


def test_classify_case():
    derived = VSAT.derived()
    assert classify_case([0.0, 2.0], derived) is Case.ML
    assert classify_case([math.pi], derived) is Case.INVISIBLE
    mid = 0.5 * (derived.psi_th + derived.psi_max)
    assert classify_case([mid, 3.0], derived) is Case.SL


@pytest.mark.parametrize("S", [10, 100])
def test_case_frequencies(S):
    derived = VSAT.with_(a=1200e3).derived()
    ref = case_probs_from(derived, S, "exact")
    mc = estimate_case_probs(S, derived, TrialConfig(trials=200_000, seed=11))
    for case, p in (("ml", ref.p_ml), ("sl", ref.p_sl), ("invisible", ref.p_inv)):
        est = mc[case]
        assert abs(est.mean - p) <= 4 * max(est.stderr, 1e-6)
    assert sum(e.mean for e in mc.values()) == pytest.approx(1.0, abs=1e-12)


def test_zero_main_lobe_gives_no_ml():
    derived = VSAT.with_(omega_th=0.0).derived()
    mc = estimate_case_probs(50, derived, TrialConfig(trials=20_000, seed=1))
    assert mc["ml"].mean == 0.0


def test_results_independent_of_worker_count():
    tc1 = TrialConfig(trials=90_000, chunk_size=10_000, seed=9, workers=1)
    tc4 = TrialConfig(trials=90_000, chunk_size=10_000, seed=9, workers=4)
    assert estimate_outage(HAND, 1.0, tc1) == estimate_outage(HAND, 1.0, tc4)
    t1 = TrialConfig(trials=1, target_used=45_000, chunk_size=10_000, seed=9, workers=1)
    t3 = TrialConfig(trials=1, target_used=45_000, chunk_size=10_000, seed=9, workers=3)
    assert estimate_outage(HAND, 1.0, t1) == estimate_outage(HAND, 1.0, t3)


def test_target_used_reaches_target():
    est = estimate_outage(HAND.with_(S=20), 1.0, TrialConfig(trials=1, target_used=30_000, chunk_size=5_000, seed=2))
    assert est.trials_used >= 30_000
    assert est.trials_discarded > 0


def test_seed_changes_stream():
    a = estimate_outage(HAND, 1.0, TrialConfig(trials=20_000, seed=1))
    b = estimate_outage(HAND, 1.0, TrialConfig(trials=20_000, seed=2))
    assert a != b


def test_conditioned_fraction_matches_invisibility():
    cfg = HAND.with_(S=20)
    p_inv = case_probs_from(cfg.derived(), cfg.S, "exact").p_inv
    est = estimate_outage(cfg, 1.0, TrialConfig(trials=200_000, seed=4))
    frac = est.trials_discarded / (est.trials_used + est.trials_discarded)
    sd = math.sqrt(p_inv * (1 - p_inv) / 200_000)
    assert abs(frac - p_inv) < 4 * sd


def test_unconditional_scales_by_visibility():
    cfg = HAND.with_(S=20)
    vis = estimate_outage(cfg, 1.0, TrialConfig(trials=50_000, seed=4))
    unc = estimate_outage(cfg, 1.0, TrialConfig(trials=50_000, seed=4, conditioning="unconditional"))
    assert unc.trials_used == vis.trials_used + vis.trials_discarded
    assert unc.mean == pytest.approx(vis.mean * vis.trials_used / unc.trials_used, rel=1e-12)


def test_zero_rate_never_outage():
    assert estimate_outage(HAND, 0.0, TrialConfig(trials=10_000, seed=1)).mean == 0.0
    assert estimate_throughput(HAND, 0.0, None, TrialConfig(trials=10_000, seed=1)).mean == 0.0
    with pytest.raises(DomainError):
        estimate_outage(HAND, -1.0)


def test_outage_matches_exact():
    est = estimate_outage(HAND, 1.0, TrialConfig(trials=1, target_used=200_000, seed=6))
    ref = outage_exact(HAND, 1.0).p_out
    assert abs(est.mean - ref) <= 4 * est.stderr


def test_throughput_matches_analytic():
    cfg = HAND.with_(S=20)
    R = 1.0
    est = estimate_throughput(cfg, R, None, TrialConfig(trials=200_000, seed=8))
    ref = throughput(R, cfg.theta_min, cfg, model="exact")
    assert abs(est.mean - ref) <= 4 * est.stderr


def test_visibility_estimate():
    cfg = VSAT.with_(S=20)
    est = estimate_visibility(cfg, TrialConfig(trials=100_000, seed=3))
    p = case_probs_from(cfg.derived(), cfg.S, "exact").p_vis
    assert abs(est.mean - p) <= 4 * est.stderr
