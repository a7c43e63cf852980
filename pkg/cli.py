"""
cli.py — Thinning Toolkit command line
Usage:
  python cli.py opt --theta 1 --rho 0.99
  python cli.py tables --format csv --out tables.csv
  python cli.py analyze trace.csv --theta 5 --mode generic
  python cli.py band --lo 0.98 --hi 0.99 --theta 10
  python cli.py simulate --rho 0.9 --theta 1 --budget 1e6 --k 1,2,8,17 --reps 200 --seed 7 --save
  python cli.py runs
"""

import argparse
import logging
import os
import sys
from datetime import date

import numpy as np
import pandas as pd

import config
import database as db
from acf import Budget, efford, estimate_acf, fit_ar1_rho, thinning_hurts
from bands import RhoBand, band_report
from data import read_trace
from efficiency import (
    AcceptanceAdjustedProblem, ThinningProblem, acceptance_adjusted_eff,
    critical_rho_for_no_thinning, eff, half_cost_k, no_thinning_is_optimal,
    no_thinning_threshold,
)
from errors import DomainError, ThinningError
from optimizer import TableSpec, efficiency_curve, k_for_rho1_limit, make_tables
from report import Report, write_output
from simulator import SimulationConfig, empirical_efficiency

logger = logging.getLogger("cli")


# ══════════════════════════════════════════════════════
# 📝  LOGGING
# ══════════════════════════════════════════════════════

def setup_logging(level: str = config.LOG_LEVEL):
    fmt = "%(asctime)s | %(levelname)s | %(name)s | %(message)s"
    handlers = [logging.StreamHandler(sys.stderr)]
    file_error = None
    try:
        os.makedirs(config.LOG_DIR, exist_ok=True)
        handlers.append(logging.FileHandler(
            os.path.join(config.LOG_DIR, f"thinning_{date.today().isoformat()}.log")))
    except OSError as e:
        file_error = e
    logging.basicConfig(level=level, format=fmt, handlers=handlers, force=True)
    if file_error is not None:
        logger.warning(f"Log directory {config.LOG_DIR} not writable, logging to stderr only: "
                       f"{file_error}")
    return logger


# ══════════════════════════════════════════════════════
# 🔡  ARGUMENT TYPES
# ══════════════════════════════════════════════════════

def _float_list(text: str) -> tuple:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _int_list(text: str) -> tuple:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


# ══════════════════════════════════════════════════════
# 🧮  COMMANDS
# ══════════════════════════════════════════════════════

def cmd_opt(args) -> Report:
    p = ThinningProblem(args.theta, args.rho)
    curve = efficiency_curve(p, args.eta)
    half = half_cost_k(p.theta)

    rep = Report(f"Optimal thinning  theta={p.theta:g}  rho={p.rho:g}")
    rep.summary = {
        "theta"                : p.theta,
        "rho"                  : p.rho,
        "eta"                  : curve.eta,
        "k_opt"                : curve.k_opt,
        "eff_k_opt"            : curve.best_efficiency,
        "k_ok"                 : curve.k_ok,
        "eff_k_ok"             : curve.efficiency(curve.k_ok),
        "no_thinning_optimal"  : no_thinning_is_optimal(p),
        "no_thinning_threshold": no_thinning_threshold(p.rho),
        "critical_rho"         : critical_rho_for_no_thinning(p.theta),
        "ceiling"              : 1.0 + p.theta,
    }
    if p.theta > 0:
        rep.summary["k_rho1_limit"] = k_for_rho1_limit(p.theta, curve.eta)

    ks = sorted({1, curve.k_ok, curve.k_opt, half})
    rows = pd.DataFrame({"k": ks, "eff": [float(eff(k, p)) for k in ks]})
    rows["label"] = ["/".join(name for name, kk in
                              (("none", 1), ("k_ok", curve.k_ok),
                               ("k_opt", curve.k_opt), ("half_cost", half)) if kk == k)
                     for k in ks]
    if args.alpha is not None:
        q = AcceptanceAdjustedProblem(p.theta, p.rho, args.alpha)
        rep.summary["alpha"] = q.alpha
        rows["eff_alpha"] = [float(acceptance_adjusted_eff(k, q)) for k in ks]
    rep.add_table("candidates", rows)
    logger.info(f"opt: theta={p.theta:g} rho={p.rho:g} -> k_opt={curve.k_opt}")
    return rep


def cmd_tables(args) -> Report:
    spec = TableSpec(args.thetas or tuple(config.TABLE_THETAS),
                     args.rhos or tuple(config.TABLE_RHOS), args.eta)
    tables = make_tables(spec, workers=args.workers)
    for msg in tables.failures:
        print(f"note: NA for {msg}", file=sys.stderr)

    rep = Report("Thinning tables")
    rep.summary = {"eta": spec.eta, "failed_cells": len(tables.failures)}
    rep.add_table("k_opt", tables.k_opt, show_index=True)
    rep.add_table("eff_k_opt", tables.eff, float_format="%.2f", show_index=True)
    rep.add_table("k_ok", tables.k_ok, show_index=True)
    return rep


def _check_rows(acf, theta: float) -> pd.DataFrame:
    rows = []
    for k in config.CHECK_KS:
        try:
            rows.append({"k": k, "efford": efford(k, acf, theta),
                         "thinning_hurts": thinning_hurts(k, acf, theta)})
        except ThinningError as e:
            logger.warning(f"k={k}: {e}")
            rows.append({"k": k, "efford": np.nan, "thinning_hurts": None})
    return pd.DataFrame(rows, columns=["k", "efford", "thinning_hurts"])


def cmd_analyze(args) -> Report:
    series = read_trace(args.trace_file)
    acf = estimate_acf(series, args.max_lag)
    rho_1 = fit_ar1_rho(acf)

    rep = Report(f"Trace analysis ({args.mode})  theta={args.theta:g}")
    rep.summary = {"n": int(series.size), "acf_lags": len(acf), "rho_1": rho_1}

    if args.mode == "ar1":
        curve = efficiency_curve(ThinningProblem(args.theta, rho_1), args.eta)
        k_opt, k_ok = curve.k_opt, curve.k_ok
        gain_opt, gain_ok = curve.best_efficiency, curve.efficiency(k_ok)
    else:
        if not 0.0 < args.eta < 1.0:
            raise DomainError(f"eta must lie in (0, 1), got {args.eta}")
        ks = np.arange(1, len(acf) + 2)
        effs = np.array([efford(int(k), acf, args.theta) for k in ks])
        k_opt = int(ks[np.argmax(effs)])
        k_ok = int(ks[np.argmax(effs >= (1.0 - args.eta) * effs.max())])
        gain_opt, gain_ok = float(effs[k_opt - 1]), float(effs[k_ok - 1])
        rep.summary["sum_acf"] = float(acf.values.sum())
        rep.summary["iat"] = 1.0 + 2.0 * float(acf.values.sum())

    rep.summary.update({"k_opt": k_opt, "eff_k_opt": gain_opt,
                        "k_ok": k_ok, "eff_k_ok": gain_ok})
    rep.add_table("thinning_checks", _check_rows(acf, args.theta))
    logger.info(f"analyze: {series.size} values, k_opt={k_opt}")
    return rep


def cmd_band(args) -> Report:
    band = RhoBand(args.lo, args.hi)
    br = band_report(band, args.theta, args.gains, args.k_cap)

    rep = Report(f"Rho band [{band.rho_lo:g}, {band.rho_hi:g}]  theta={br.theta:g}")
    rep.summary = {
        "rho_lo"            : band.rho_lo,
        "rho_hi"            : band.rho_hi,
        "theta"             : br.theta,
        "k_search_cap"      : br.k_search_cap,
        "nondominated_lo"   : br.candidate_set.lo,
        "nondominated_hi"   : br.candidate_set.hi,
        "max_certified_gain": br.max_certified_gain,
    }
    rows = [{"gain": g,
             "k_lo": iv.lo if iv else None,
             "k_hi": iv.hi if iv else None,
             "contiguous": iv.contiguous if iv else None}
            for g, iv in br.gain_sets.items()]
    frame = pd.DataFrame(rows, columns=["gain", "k_lo", "k_hi", "contiguous"])
    frame[["k_lo", "k_hi"]] = frame[["k_lo", "k_hi"]].astype("Int64")
    rep.add_table("guaranteed_gain", frame)
    return rep


def cmd_simulate(args) -> Report:
    cfg = SimulationConfig(args.rho, args.theta, Budget(args.budget), args.k,
                           args.reps, args.seed, args.sigma2)
    result = empirical_efficiency(cfg, workers=args.workers)

    rep = Report(f"Simulation  rho={cfg.rho:g}  theta={cfg.theta:g}  B={cfg.budget.B:g}")
    rep.summary = dict(cfg.to_dict(), k_values=",".join(map(str, cfg.k_values)),
                       flagged=len(result.flagged))
    rep.add_table("records", result.to_frame())
    if args.save:
        run_id = db.save_simulation(result)
        print(f"saved run {run_id}", file=sys.stderr)
    return rep


def cmd_runs(args) -> Report:
    runs = db.list_simulations(args.limit)
    rep = Report("Archived simulation runs")
    rep.summary = {"runs": len(runs)}
    rep.add_table("runs", pd.DataFrame(
        runs, columns=["id", "created_at", "rho", "theta", "budget",
                       "replications", "seed", "n_flagged"]))
    return rep


# ══════════════════════════════════════════════════════
# 🚀  ENTRY
# ══════════════════════════════════════════════════════

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=config.OUTPUT_FORMATS, default="text",
                        help="Output format (default: text)")
    common.add_argument("--out", default=None, help="Write the report here instead of stdout")
    common.add_argument("--log-level", default=config.LOG_LEVEL,
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"])

    parser = argparse.ArgumentParser(description="Thinning efficiency for MCMC output")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("opt", parents=[common], help="Optimal k for theta and rho",
                       epilog="rho**k is computed as exp(k log rho); when it underflows "
                              "the efficiency takes its limit instead of failing.")
    p.add_argument("--theta", type=float, required=True, help="Cost of f relative to one transition")
    p.add_argument("--rho", type=float, required=True, help="Lag-1 autocorrelation")
    p.add_argument("--eta", type=float, default=config.DEFAULT_ETA)
    p.add_argument("--alpha", type=float, default=None,
                   help="Acceptance rate; also report efficiency when f is reused on rejection")
    p.set_defaults(func=cmd_opt)

    p = sub.add_parser("tables", parents=[common], help="k_opt, eff(k_opt) and k_ok grids")
    p.add_argument("--eta", type=float, default=config.DEFAULT_ETA)
    p.add_argument("--thetas", type=_float_list, default=None)
    p.add_argument("--rhos", type=_float_list, default=None)
    p.add_argument("--workers", type=int, default=config.SIM_WORKERS)
    p.set_defaults(func=cmd_tables)

    p = sub.add_parser("analyze", parents=[common], help="Recommend k for a recorded trace")
    p.add_argument("trace_file")
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--max-lag", type=int, default=config.DEFAULT_MAX_LAG)
    p.add_argument("--mode", choices=["ar1", "generic"], default="ar1")
    p.add_argument("--eta", type=float, default=config.DEFAULT_ETA)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("band", parents=[common], help="Robust analysis for rho in [lo, hi]")
    p.add_argument("--lo", type=float, required=True)
    p.add_argument("--hi", type=float, required=True)
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--gains", type=_float_list, default=config.BAND_GAINS)
    p.add_argument("--k-cap", type=int, default=None)
    p.set_defaults(func=cmd_band)

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo check on AR(1) chains")
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--theta", type=float, default=1.0)
    p.add_argument("--budget", type=float, default=1e6)
    p.add_argument("--k", type=_int_list, default=(1,))
    p.add_argument("--reps", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sigma2", type=float, default=1.0)
    p.add_argument("--workers", type=int, default=config.SIM_WORKERS)
    p.add_argument("--save", action="store_true", help="Archive the run in the database")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("runs", parents=[common], help="List archived simulation runs")
    p.add_argument("--limit", type=int, default=20)
    p.set_defaults(func=cmd_runs)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level)
    try:
        report = args.func(args)
        write_output(report.render(args.format), args.out)
    except (ThinningError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
