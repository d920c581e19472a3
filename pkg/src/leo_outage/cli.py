"""Command-line entry point.

    leo-outage outage --preset handheld-table1 --fading ils --S 100 --a 600km --R 1
    leo-outage optimize --preset vsat-table1 --eta 0.9 --eps 0.1 --method both
    leo-outage figure fig5 --out fig5.csv

Rows go to stdout (or ``--out``) as CSV, or as JSON ``{"config": ..., "rows": [...]}``
with ``--format json``; the ``config`` object can be fed back through ``--config``.
Exit status: 0 success, 1 invalid input, 2 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time

import numpy as np

from . import figures
from .config import (
    PRESETS,
    SystemConfig,
    apply_overrides,
    load_config,
    parse_angle,
    preset,
    to_pairs,
)
from .distributions import case_probs_from, nearest_dist, serving_ml_dist, serving_sl_dist
from .errors import ConfigValidationError, NumericalError, ValidationError
from .montecarlo import TrialConfig, estimate_case_probs, estimate_outage, estimate_throughput, sample_nearest_distance
from .optimizer import OptConstraints, optimize_exhaustive, optimize_iterative, throughput, visible_prob
from .outage import outage, series_increment, truncated_outage_approx

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------- config assembly


def build_config(args) -> SystemConfig:
    base = preset(args.preset) if args.preset else PRESETS["vsat-table1"]
    cfg = load_config(args.config, base=base) if args.config else base
    pairs: dict[str, str] = {}
    if args.fading:
        pairs["fading"] = args.fading
    if args.S is not None:
        pairs["constellation.S"] = args.S
    if args.a:
        pairs["constellation.a"] = args.a
    if args.model:
        pairs["model"] = args.model
    if args.theta_min:
        pairs["theta_min"] = args.theta_min
    if args.g:
        pairs["link.rain_g"] = args.g
    if args.omega_e:
        pairs["antennas.omega_e"] = args.omega_e
    if args.alpha:
        pairs["band.alpha"] = args.alpha
    for item in args.set or []:
        if "=" not in item:
            raise ConfigValidationError("--set", f"expected key=value, got {item!r}")
        k, v = (s.strip() for s in item.split("=", 1))
        pairs[k] = v
    return apply_overrides(cfg, pairs)


def _trial_cfg(args, conditioned: bool = True) -> TrialConfig:
    if conditioned:
        return TrialConfig(trials=1, target_used=args.trials, seed=args.seed, workers=args.workers)
    return TrialConfig(trials=args.trials, seed=args.seed, workers=args.workers)


def _rates(args) -> list[float]:
    return [float(r) for r in args.R]


# ---------------------------------------------------------------- subcommands


def cmd_geometry(cfg, args):
    d = cfg.derived()
    return [
        {
            "theta_min_deg": math.degrees(d.theta_min),
            "a_km": cfg.a / 1e3,
            "d_max_km": d.d_max / 1e3,
            "psi_max_deg": math.degrees(d.psi_max),
            "psi_th_deg": math.degrees(d.psi_th),
            "d_th_km": d.d_th / 1e3,
            "area_ml_km2": d.area_ml / 1e6,
            "area_sl_km2": d.area_sl / 1e6,
            "area_vis_km2": d.area_vis / 1e6,
        }
    ]


def cmd_case_probs(cfg, args):
    cp = case_probs_from(cfg.derived(), cfg.S, cfg.model)
    return [{"model": cp.model.value, "p_ml": cp.p_ml, "p_sl": cp.p_sl, "p_inv": cp.p_inv, "p_vis": cp.p_vis}]


def _dist_grid(cfg, points):
    d = cfg.derived()
    return np.linspace(cfg.a, d.d_max, points)


def cmd_dist(cfg, args):
    d = cfg.derived()
    xs = _dist_grid(cfg, args.points)
    cdf, pdf = nearest_dist(xs, cfg.S, cfg.geo, cfg.model)
    ml_cdf = sl_cdf = None
    if d.d_th > cfg.a:
        ml_cdf, _ = serving_ml_dist(xs, cfg.S, d, cfg.model)
    if d.d_max > d.d_th:
        sl_cdf, _ = serving_sl_dist(xs, cfg.S, d, cfg.model)
    rows = []
    for i, x in enumerate(xs):
        rows.append(
            {
                "x_km": x / 1e3,
                "nearest_cdf": float(cdf[i]),
                "nearest_pdf": float(pdf[i]),
                "serving_ml_cdf": float(ml_cdf[i]) if ml_cdf is not None else math.nan,
                "serving_sl_cdf": float(sl_cdf[i]) if sl_cdf is not None else math.nan,
            }
        )
    return rows


def cmd_outage(cfg, args):
    rows = []
    for R in _rates(args):
        res = outage(cfg, R, model=cfg.model)
        rows.append({"p_out": res.p_out, "p_out_ml": res.p_out_ml, "p_out_sl": res.p_out_sl, "n_used": res.n_used})
    return rows


def cmd_throughput(cfg, args):
    rows = []
    for R in _rates(args):
        rows.append(
            {
                "R": R,
                "theta_min_deg": math.degrees(cfg.theta_min),
                "p_vis": visible_prob(cfg.theta_min, cfg),
                "p_out": outage(cfg, R, model=cfg.model).p_out,
                "T": throughput(R, cfg.theta_min, cfg),
            }
        )
    return rows


def cmd_optimize(cfg, args):
    cons = OptConstraints(
        eta=args.eta,
        epsilon=args.eps,
        delta_r=args.delta_r,
        delta_theta=parse_angle(args.delta_theta, "--delta-theta"),
        r_hat=args.r_hat,
        max_iters=args.max_iters,
    )
    methods = {"iterative": [optimize_iterative], "exhaustive": [optimize_exhaustive]}.get(
        args.method, [optimize_iterative, optimize_exhaustive]
    )
    rows = []
    for solver in methods:
        t0 = time.perf_counter()
        res = solver(cfg, cons)
        rows.append(
            {
                "method": res.method,
                "R_star": res.r_star,
                "theta_star_deg": math.degrees(res.theta_star),
                "T": res.throughput,
                "iterations": res.iterations,
                "wall_ms": 1e3 * (time.perf_counter() - t0),
            }
        )
    return rows


def cmd_simulate(cfg, args):
    what = args.quantity
    if what == "outage":
        rows = []
        for R in _rates(args):
            res = outage(cfg, R, model=cfg.model)
            mc = estimate_outage(cfg, R, _trial_cfg(args))
            rows.append(
                {
                    "R": R,
                    "p_out": res.p_out,
                    "p_out_mc": mc.mean,
                    "mc_stderr": mc.stderr,
                    "trials_used": mc.trials_used,
                    "trials_discarded": mc.trials_discarded,
                }
            )
        return rows
    if what == "throughput":
        rows = []
        for R in _rates(args):
            mc = estimate_throughput(cfg, R, None, _trial_cfg(args, conditioned=False))
            rows.append({"R": R, "T": throughput(R, cfg.theta_min, cfg), "T_mc": mc.mean, "mc_stderr": mc.stderr})
        return rows
    if what == "case-probs":
        d = cfg.derived()
        cp = case_probs_from(d, cfg.S, cfg.model)
        mc = estimate_case_probs(cfg.S, d, _trial_cfg(args, conditioned=False))
        analytic = {"ml": cp.p_ml, "sl": cp.p_sl, "invisible": cp.p_inv}
        return [{"case": k, "p": analytic[k], "p_mc": mc[k].mean, "mc_stderr": mc[k].stderr} for k in analytic]
    # nearest-distance law
    xs = _dist_grid(cfg, args.points)
    cdf, _ = nearest_dist(xs, cfg.S, cfg.geo, cfg.model)
    emp = np.sort(sample_nearest_distance(cfg.S, cfg.geo, args.trials, args.seed))
    rows = []
    for i, x in enumerate(xs):
        p = float(np.searchsorted(emp, x, side="right") / emp.size)
        rows.append({"x_km": x / 1e3, "nearest_cdf": float(cdf[i]), "nearest_cdf_mc": p, "mc_stderr": math.sqrt(p * (1 - p) / emp.size)})
    return rows


_SWEEP_KEYS = {"R", "theta_min", "S", "a", "N"}
_SWEEP_OUTPUTS = ("p_out", "p_vis", "T", "p_ml", "p_sl", "p_inv", "delta")


def _sweep_values(args):
    lo, hi = args.lo, args.hi
    if not lo < hi:
        raise ConfigValidationError("--lo/--hi", "need lo < hi")
    if args.count:
        return list(np.linspace(lo, hi, args.count))
    if not args.step or args.step <= 0:
        raise ConfigValidationError("--step", "need step > 0 (or --count)")
    n = int(math.floor((hi - lo) / args.step + 1e-9))
    return [lo + i * args.step for i in range(n + 1)]


def cmd_sweep(cfg, args):
    outs = args.outputs.split(",")
    bad = [o for o in outs if o not in _SWEEP_OUTPUTS]
    if bad:
        raise ConfigValidationError("--outputs", f"unknown quantity {bad}; choose from {list(_SWEEP_OUTPUTS)}")
    var = args.var
    R0 = _rates(args)[0]
    rows = []
    for v in _sweep_values(args):
        c, R, label = cfg, R0, v
        N = None
        if var == "R":
            R = v
        elif var == "theta_min":
            c = cfg.with_(theta_min=math.radians(v))
        elif var == "S":
            c = cfg.with_(S=int(round(v)))
            label = c.S
        elif var == "a":
            c = cfg.with_(a=v * 1e3)
        else:
            N = int(round(v))
            label = N
        row = {f"{var}{'_deg' if var == 'theta_min' else '_km' if var == 'a' else ''}": label}
        cp = case_probs_from(c.derived(), c.S, c.model)
        for o in outs:
            if o == "p_out":
                row[o] = truncated_outage_approx(N, c, R) if N is not None else outage(c, R, model=c.model).p_out
            elif o == "p_vis":
                row[o] = cp.p_vis
            elif o == "T":
                row[o] = throughput(R, c.theta_min, c)
            elif o == "delta":
                row[o] = series_increment(max(N or 1, 1), c, R)[2]
            else:
                row[o] = getattr(cp, o)
        rows.append(row)
    return rows


def cmd_figure(cfg, args):
    fn = figures.FIGURES[args.name]
    kwargs = {}
    if args.trials is not None and "trials" in fn.__code__.co_varnames:
        kwargs["trials"] = args.trials
    if args.seed is not None and "seed" in fn.__code__.co_varnames:
        kwargs["seed"] = args.seed
    if args.grid:
        lo, hi, step = (float(s) for s in args.grid.split(":"))
        first = fn.__code__.co_varnames[0]
        n = int(math.floor((hi - lo) / step + 1e-9))
        kwargs[first] = tuple(lo + i * step for i in range(n + 1))
    return fn(**kwargs)


# ---------------------------------------------------------------- output


def _cell(v):
    if isinstance(v, float):
        return repr(float(v))
    return v


def emit(rows, args, cfg=None):
    if args.format == "json":
        doc = {"rows": rows}
        if cfg is not None:
            doc = {"config": to_pairs(cfg), "rows": rows}
        text = json.dumps(doc, indent=2, allow_nan=True) + "\n"
    else:
        buf = io.StringIO()
        if rows:
            w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
            w.writeheader()
            for r in rows:
                w.writerow({k: _cell(v) for k, v in r.items()})
        text = buf.getvalue()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- parser


def _scenario_args(p):
    g = p.add_argument_group("scenario")
    g.add_argument("--preset", choices=sorted(PRESETS), help="base scenario (default vsat-table1)")
    g.add_argument("--config", help="config file (key = value lines, or JSON)")
    g.add_argument("--fading", help="fading preset: fhs-paper, fhs-canonical, as, ils")
    g.add_argument("--S", help="number of satellites")
    g.add_argument("--a", help="altitude with unit, e.g. 600km")
    g.add_argument("--model", help="exact or approx")
    g.add_argument("--theta-min", dest="theta_min", help="minimum elevation, e.g. 10deg")
    g.add_argument("--g", help="rain attenuation gain, e.g. -3dB")
    g.add_argument("--omega-e", dest="omega_e", help="VSAT pointing error, e.g. 1deg")
    g.add_argument("--alpha", help="path-loss exponent")
    g.add_argument("--set", action="append", metavar="KEY=VALUE", help="any config key (repeatable)")
    _output_args(p)


def _output_args(p):
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help="write to this file instead of stdout")


def _mc_args(p, default_trials):
    p.add_argument("--trials", type=int, default=default_trials)
    p.add_argument("--seed", type=int, default=None, help="overrides LEO_MC_SEED")
    p.add_argument("--workers", type=int, default=1)


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="leo-outage", description="Outage and throughput of LEO constellations under shadowed-Rician fading.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    for name, helptext in (("geometry", "slant ranges, polar angles and areas"), ("case-probs", "serving-case probabilities")):
        _scenario_args(sub.add_parser(name, help=helptext))

    p = sub.add_parser("dist", help="nearest and serving distance laws on a grid")
    _scenario_args(p)
    p.add_argument("--points", type=int, default=50)

    for name, helptext in (("outage", "outage probability"), ("throughput", "system throughput")):
        p = sub.add_parser(name, help=helptext)
        _scenario_args(p)
        p.add_argument("--R", nargs="+", default=["1.0"], help="rate(s) in bps/Hz")

    p = sub.add_parser("optimize", help="maximize throughput over rate and elevation mask")
    _scenario_args(p)
    p.add_argument("--eta", type=float, default=0.9)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--method", choices=("iterative", "exhaustive", "both"), default="both")
    p.add_argument("--delta-r", dest="delta_r", type=float, default=0.01)
    p.add_argument("--delta-theta", dest="delta_theta", default="0.1deg")
    p.add_argument("--r-hat", dest="r_hat", type=float, default=10.0)
    p.add_argument("--max-iters", dest="max_iters", type=int, default=50)

    p = sub.add_parser("simulate", help="Monte-Carlo estimate next to the analytic value")
    p.add_argument("quantity", choices=("outage", "throughput", "case-probs", "dist"))
    _scenario_args(p)
    _mc_args(p, 100_000)
    p.add_argument("--R", nargs="+", default=["1.0"])
    p.add_argument("--points", type=int, default=50)

    p = sub.add_parser("sweep", help="tabulate quantities over one variable")
    _scenario_args(p)
    p.add_argument("--var", choices=sorted(_SWEEP_KEYS), required=True)
    p.add_argument("--lo", type=float, required=True)
    p.add_argument("--hi", type=float, required=True)
    p.add_argument("--step", type=float)
    p.add_argument("--count", type=int)
    p.add_argument("--outputs", default="p_out", help=f"comma list from {','.join(_SWEEP_OUTPUTS)}")
    p.add_argument("--R", nargs=1, default=["1.0"], help="rate when not swept")

    p = sub.add_parser("figure", help="curve data for a standard figure")
    p.add_argument("name", choices=sorted(figures.FIGURES))
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--grid", help="lo:hi:step for the figure's main sweep variable")
    _output_args(p)
    return parser


COMMANDS = {
    "geometry": cmd_geometry,
    "case-probs": cmd_case_probs,
    "dist": cmd_dist,
    "outage": cmd_outage,
    "throughput": cmd_throughput,
    "optimize": cmd_optimize,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "figure": cmd_figure,
}


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        cfg = None if args.command == "figure" else build_config(args)
        rows = COMMANDS[args.command](cfg, args)
        emit(rows, args, cfg)
    except ValidationError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
