"""Outage probability and throughput of LEO satellite constellations with
uniformly placed satellites and shadowed-Rician fading."""
from .channel import FADING_PRESETS, LinkBudget, SeriesControl, ShadowedRicianParams, sr_cdf, sr_sample
from .config import PRESETS, SystemConfig, load_config, preset
from .distributions import CaseProbabilities, Model, case_probs, nearest_dist, serving_ml_dist, serving_sl_dist
from .errors import LeoError, NumericalError, ValidationError
from .geometry import EarthGeometry, surface_areas
from .optimizer import OptConstraints, OptResult, optimize_exhaustive, optimize_iterative, throughput
from .outage import (
    OutageResult,
    outage,
    outage_approx,
    outage_approx_alpha2,
    outage_asymptotic,
    outage_exact,
    outage_exact_closed_form,
    series_increment,
)

__version__ = "0.1.0"
