"""Curve data for the standard result figures, as lists of row dicts.

Every function takes its sweep grid as an argument with the usual range as
default, and starts from the built-in terminal presets.
"""
from __future__ import annotations

import math
import time

import numpy as np

from .config import PRESETS, db_to_linear, linear_to_db
from .distributions import case_probs_from, nearest_dist, visible_probability
from .errors import LeoError
from .montecarlo import TrialConfig, estimate_case_probs, estimate_outage, estimate_throughput, sample_nearest_distance
from .optimizer import OptConstraints, optimize_exhaustive, optimize_iterative, throughput
from .outage import outage_approx_alpha2, outage_approx, outage_asymptotic, outage_exact, series_increment, truncated_outage_approx

FADINGS = ("fhs-canonical", "as", "ils")
TERMINALS = ("vsat-table1", "handheld-table1")


def _approx(cfg, R, theta_min=None):
    fn = outage_approx_alpha2 if cfg.alpha == 2 else outage_approx
    return fn(cfg, R, theta_min=theta_min).p_out


def fig2(S_values=(1, 2, 5, 10, 20, 50, 100, 200, 500, 1000), a=1200e3, trials=20_000, seed=None):
    """Serving-case probabilities versus constellation size."""
    base = PRESETS["vsat-table1"].with_(a=a)
    rows = []
    for S in S_values:
        cfg = base.with_(S=int(S))
        d = cfg.derived()
        ex = case_probs_from(d, cfg.S, "exact")
        ap = case_probs_from(d, cfg.S, "approx")
        row = {"S": cfg.S, "a_km": a / 1e3}
        for tag, cp in (("exact", ex), ("approx", ap)):
            row.update({f"p_ml_{tag}": cp.p_ml, f"p_sl_{tag}": cp.p_sl, f"p_inv_{tag}": cp.p_inv})
        if trials:
            mc = estimate_case_probs(cfg.S, d, TrialConfig(trials=trials, seed=seed))
            row.update({"p_ml_mc": mc["ml"].mean, "p_sl_mc": mc["sl"].mean, "p_inv_mc": mc["invisible"].mean})
        rows.append(row)
    return rows


def fig3(S_values=(1, 10, 100), a=600e3, points=60, trials=20_000, seed=None):
    """Nearest-satellite distance CDF/PDF, both point-process models."""
    geo = PRESETS["vsat-table1"].with_(a=a).geo
    xs = np.linspace(geo.a, geo.horizon_range, points)
    rows = []
    for S in S_values:
        cdf_e, pdf_e = nearest_dist(xs, S, geo, "exact")
        cdf_a, pdf_a = nearest_dist(xs, S, geo, "approx")
        emp = np.sort(sample_nearest_distance(S, geo, trials, seed)) if trials else None
        for i, x in enumerate(xs):
            row = {
                "S": S,
                "x_km": x / 1e3,
                "cdf_exact": float(cdf_e[i]),
                "pdf_exact": float(pdf_e[i]),
                "cdf_approx": float(cdf_a[i]),
                "pdf_approx": float(pdf_a[i]),
            }
            if emp is not None:
                row["cdf_mc"] = float(np.searchsorted(emp, x, side="right") / emp.size)
            rows.append(row)
    return rows


def fig5(theta_deg=tuple(range(0, 91, 5)), a_values=(300e3, 600e3, 1200e3), S=100, trials=10_000, seed=None):
    """Visibility probability versus minimum elevation."""
    rows = []
    for a in a_values:
        cfg = PRESETS["vsat-table1"].with_(a=a, S=S)
        for th in theta_deg:
            theta = math.radians(th)
            row = {
                "theta_min_deg": float(th),
                "a_km": a / 1e3,
                "p_vis_exact": visible_probability(S, cfg.geo, theta, "exact"),
                "p_vis_approx": visible_probability(S, cfg.geo, theta, "approx"),
                "p_vis_mc": math.nan,
                "mc_stderr": math.nan,
            }
            if trials:
                mc = estimate_case_probs(S, cfg.derived(theta), TrialConfig(trials=trials, seed=seed))
                inv = mc["invisible"]
                row["p_vis_mc"] = 1.0 - inv.mean
                row["mc_stderr"] = inv.stderr
            rows.append(row)
    return rows


def _rate_curves(quantity, R_values, S, a, trials, seed):
    rows = []
    for term in TERMINALS:
        for fad in FADINGS:
            cfg = PRESETS[term].with_(S=S, a=a, fading=fad)
            for R in R_values:
                if quantity == "outage":
                    row = {
                        "terminal": cfg.terminal,
                        "fading": fad,
                        "R": float(R),
                        "p_out_exact": outage_exact(cfg, R).p_out,
                        "p_out_approx": _approx(cfg, R),
                    }
                    mc = estimate_outage(cfg, R, TrialConfig(trials=1, target_used=trials, seed=seed)) if trials else None
                    row["p_out_mc"] = mc.mean if mc else math.nan
                else:
                    row = {
                        "terminal": cfg.terminal,
                        "fading": fad,
                        "R": float(R),
                        "T_exact": throughput(R, cfg.theta_min, cfg, model="exact"),
                        "T_approx": throughput(R, cfg.theta_min, cfg, model="approx"),
                    }
                    mc = estimate_throughput(cfg, R, None, TrialConfig(trials=trials, seed=seed)) if trials else None
                    row["T_mc"] = mc.mean if mc else math.nan
                row["mc_stderr"] = mc.stderr if mc else math.nan
                rows.append(row)
    return rows


def fig6(R_values=tuple(np.round(np.arange(0.25, 3.01, 0.25), 2)), S=100, a=600e3, trials=20_000, seed=None):
    """Outage versus rate for each terminal and fading preset."""
    return _rate_curves("outage", R_values, S, a, trials, seed)


def fig7(R_values=tuple(np.round(np.arange(0.25, 6.01, 0.25), 2)), S=100, a=600e3, trials=20_000, seed=None):
    """Throughput versus rate for each terminal and fading preset."""
    return _rate_curves("throughput", R_values, S, a, trials, seed)


def fig8(S_values=(1, 2, 5, 10, 20, 50, 100, 200, 500, 1000), a=600e3, R=1.0, fading="ils"):
    """Outage versus constellation size with the large-S limit."""
    rows = []
    for term in TERMINALS:
        base = PRESETS[term].with_(a=a, fading=fading)
        limit = outage_asymptotic(base, R)
        for S in S_values:
            cfg = base.with_(S=int(S))
            rows.append(
                {
                    "terminal": cfg.terminal,
                    "S": cfg.S,
                    "p_out_exact": outage_exact(cfg, R).p_out,
                    "p_out_approx": _approx(cfg, R),
                    "p_out_asymptotic": limit,
                }
            )
    return rows


def fig9(N_values=tuple(range(1, 101)), S=100, a=600e3, R=1.0, rain_db=0.0):
    """Approximated outage versus the number of fading-series terms (VSAT)."""
    rows = []
    for fad in FADINGS:
        cfg = PRESETS["vsat-table1"].with_(S=S, a=a, fading=fad, rain_g=db_to_linear(rain_db))
        for N in N_values:
            rows.append(
                {
                    "fading": fad,
                    "N": int(N),
                    "p_out_approx": truncated_outage_approx(int(N), cfg, R),
                    "delta": series_increment(int(N), cfg, R)[2],
                }
            )
    return rows


def fig10(theta_deg=tuple(range(0, 61, 2)), a_values=(300e3, 600e3, 1200e3), S=100, R=0.5, rain_db=-3.0, fading="fhs-canonical"):
    """Outage versus minimum elevation for several altitudes."""
    rows = []
    for term in TERMINALS:
        for a in a_values:
            cfg = PRESETS[term].with_(S=S, a=a, fading=fading)
            if cfg.terminal == "vsat":
                cfg = cfg.with_(rain_g=db_to_linear(rain_db))
            for th in theta_deg:
                theta = math.radians(th)
                try:
                    ex = outage_exact(cfg, R, theta_min=theta).p_out
                    ap = _approx(cfg, R, theta)
                except LeoError:
                    ex = ap = math.nan
                rows.append(
                    {
                        "terminal": cfg.terminal,
                        "a_km": a / 1e3,
                        "theta_min_deg": float(th),
                        "p_out_exact": ex,
                        "p_out_approx": ap,
                    }
                )
    return rows


def fig11(S_values=(50, 100, 150, 200, 300, 500), a=600e3, rain_db=(0.0, -3.0), omega_e_deg=(0.0, 1.0), constraints=OptConstraints()):
    """Maximum throughput versus constellation size, both solvers (approx model)."""
    rows = []
    base = PRESETS["vsat-table1"].with_(a=a, model="approx")
    for g in rain_db:
        for we in omega_e_deg:
            for S in S_values:
                cfg = base.with_(S=int(S), rain_g=db_to_linear(g), omega_e_deg=float(we))
                for method, solver in (("iterative", optimize_iterative), ("exhaustive", optimize_exhaustive)):
                    t0 = time.perf_counter()
                    try:
                        res = solver(cfg, constraints)
                        status, R, th, T = "ok", res.r_star, math.degrees(res.theta_star), res.throughput
                    except LeoError as exc:
                        status, R, th, T = type(exc).__name__, math.nan, math.nan, 0.0
                    rows.append(
                        {
                            "S": cfg.S,
                            "g_db": round(linear_to_db(cfg.rain_g), 6),
                            "omega_e_deg": cfg.omega_e_deg,
                            "method": method,
                            "status": status,
                            "R_star": R,
                            "theta_star_deg": th,
                            "T": T,
                            "wall_ms": 1e3 * (time.perf_counter() - t0),
                        }
                    )
    return rows


FIGURES = {
    "fig2": fig2,
    "fig3": fig3,
    "fig5": fig5,
    "fig6": fig6,
    "fig7": fig7,
    "fig8": fig8,
    "fig9": fig9,
    "fig10": fig10,
    "fig11": fig11,
}
