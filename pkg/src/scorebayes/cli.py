"""Batch command-line entry point.

Commands bind a flat sectioned key-value config file plus a master seed to
the library: ``simulate`` writes a DGP draw, ``backtest`` runs the
expanding-window study, ``murphy`` scores two (VaR, ES) forecast files
against actuals, and ``msis-batch`` runs the interval backtest over a
directory of series. Every command echoes its resolved configuration and
seed into the output directory; reruns with identical inputs are
byte-identical.

Exit codes: 0 success, 2 validation error, 3 numerical or sampler failure,
4 I/O error.
"""

from __future__ import annotations

import argparse
import configparser
import json
import os
import sys

import numpy as np

from . import backtest as bt
from . import evaluation as ev
from . import models as _models
from . import posterior as post
from . import scoring as sc
from .dgp import SvSkewConfig, simulate_sv_skew
from .utils import (
    CalibrationError,
    ConvergenceError,
    DegenerateScaleError,
    InvalidInputError,
    NumericalError,
    SamplerError,
    derive_rng,
    derive_seed,
)

_FMT = "%.17g"


class ConfigError(InvalidInputError):
    """Invalid or missing configuration keys."""


# ---------------------------------------------------------------------------
# config plumbing


def _load_config(path) -> configparser.ConfigParser:
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    cfg = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        cfg.read(path, encoding="utf-8")
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc
    return cfg


def _require(cfg, section, keys):
    missing = [k for k in keys if not cfg.has_option(section, k)]
    if missing:
        raise ConfigError(f"config section [{section}] is missing keys: {missing}")


def _getfloat(cfg, section, key, default=None):
    try:
        if default is not None and not cfg.has_option(section, key):
            return default
        return cfg.getfloat(section, key)
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key} must be a number") from exc


def _getint(cfg, section, key, default=None):
    try:
        if default is not None and not cfg.has_option(section, key):
            return default
        return cfg.getint(section, key)
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key} must be an integer") from exc


def _getlist(cfg, section, key, default=()):
    if not cfg.has_option(section, key):
        return list(default)
    raw = cfg.get(section, key)
    return [tok.strip() for tok in raw.split(",") if tok.strip()]


def _resolve_seed(cfg, args) -> int:
    if args.seed is not None:
        return int(args.seed)
    if cfg.has_section("run") and cfg.has_option("run", "seed"):
        return _getint(cfg, "run", "seed")
    raise ConfigError("no seed given: set [run] seed or pass --seed (unseeded runs are refused)")


def _resolve_outdir(cfg, args) -> str:
    out = args.out or (cfg.get("run", "out", fallback=None) if cfg.has_section("run") else None)
    if not out:
        raise ConfigError("no output directory: set [run] out or pass --out")
    return out


def _echo_config(cfg, outdir, seed, command):
    lines = [f"command = {command}", f"master_seed = {seed}"]
    for section in sorted(cfg.sections()):
        for key in sorted(cfg.options(section)):
            lines.append(f"{section}.{key} = {cfg.get(section, key)}")
    with open(os.path.join(outdir, "config_echo.txt"), "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _load_series(path):
    """First numeric column of a header-carrying CSV."""
    if not os.path.exists(path):
        raise ConfigError(f"data file not found: {path}")
    with open(path, "r", encoding="utf-8") as fh:
        rows = [line.rstrip("\n").split(",") for line in fh if line.strip()]
    if len(rows) < 2:
        raise InvalidInputError(f"{path}: need a header row plus data")
    header, data = rows[0], rows[1:]
    for col in range(len(header)):
        try:
            return np.array([float(r[col]) for r in data])
        except (ValueError, IndexError):
            continue
    raise InvalidInputError(f"{path}: no numeric column found")


def _write_series_csv(path, name, values):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{name}\n")
        for v in values:
            fh.write((_FMT % v) + "\n")


# ---------------------------------------------------------------------------
# commands


def cmd_simulate(cfg, outdir, seed, verbose=False) -> int:
    if not cfg.has_section("dgp"):
        raise ConfigError("simulate requires a [dgp] section")
    _require(cfg, "dgp", ["n"])
    n = _getint(cfg, "dgp", "n")
    config = SvSkewConfig(
        a=_getfloat(cfg, "dgp", "a", 0.9),
        h_bar=_getfloat(cfg, "dgp", "h_bar", -0.4581),
        sigma_h=_getfloat(cfg, "dgp", "sigma_h", 0.4173),
        gamma=_getfloat(cfg, "dgp", "gamma", -5.0),
        fz_sample_size=_getint(cfg, "dgp", "fz_sample_size", 1_000_000),
        fz_seed=_getint(cfg, "dgp", "fz_seed", 0),
    )
    y, h = simulate_sv_skew(config, n, seed=seed)
    _write_series_csv(os.path.join(outdir, "series.csv"), "y", y)
    if cfg.getboolean("dgp", "latent", fallback=False):
        _write_series_csv(os.path.join(outdir, "latent.csv"), "h", h)
    if verbose:
        print(f"simulate: wrote {n} observations to {outdir}", file=sys.stderr)
    return 0


def _build_model(cfg, series, initial_window):
    cls = cfg.get("model", "class", fallback="arch").strip().lower()
    if cls == "arch":
        return _models.Arch1Class()
    if cls == "garch":
        return _models.Garch11Class()
    if cls == "pool":
        window0 = series[:initial_window]
        psi1 = _models.fit_mle("arch_skew", window0).params
        psi2 = _models.fit_mle("garch", window0).params
        return _models.LinearPoolClass(psi1, psi2)
    raise ConfigError(f"[model] class must be arch, garch or pool, got {cls!r}")


def cmd_backtest(cfg, outdir, seed, threads=1, verbose=False) -> int:
    if cfg.has_section("data") and cfg.has_option("data", "path"):
        series = _load_series(cfg.get("data", "path"))
    elif cfg.has_section("dgp"):
        _require(cfg, "dgp", ["n"])
        config = SvSkewConfig(
            a=_getfloat(cfg, "dgp", "a", 0.9),
            h_bar=_getfloat(cfg, "dgp", "h_bar", -0.4581),
            sigma_h=_getfloat(cfg, "dgp", "sigma_h", 0.4173),
            gamma=_getfloat(cfg, "dgp", "gamma", -5.0),
        )
        series, _ = simulate_sv_skew(config, _getint(cfg, "dgp", "n"), seed=derive_seed(seed, "data"))
    else:
        raise ConfigError("backtest requires [data] path or a [dgp] section")

    _require(cfg, "backtest", ["initial_window"])
    update_rules = _getlist(cfg, "backtest", "update_rules", ("ls",))
    eval_rules = _getlist(cfg, "backtest", "eval_rules", update_rules)
    for ident in set(update_rules) | set(eval_rules):
        sc.parse_rule(ident)  # validation only

    chain = post.ChainSettings(
        burn_in=_getint(cfg, "chain", "burn_in", 10_000) if cfg.has_section("chain") else 10_000,
        iters=_getint(cfg, "chain", "iters", 40_000) if cfg.has_section("chain") else 40_000,
        thin=_getint(cfg, "chain", "thin", 10) if cfg.has_section("chain") else 10,
        step_init=_getfloat(cfg, "chain", "step_init", 0.05) if cfg.has_section("chain") else 0.05,
    )
    warm = (
        _getint(cfg, "chain", "warm_burn_in", chain.burn_in)
        if cfg.has_section("chain")
        else chain.burn_in
    )
    config = bt.BacktestConfig(
        initial_window=_getint(cfg, "backtest", "initial_window"),
        steps=_getint(cfg, "backtest", "steps") if cfg.has_option("backtest", "steps") else None,
        final=_getint(cfg, "backtest", "final") if cfg.has_option("backtest", "final") else None,
        update_rules=tuple(update_rules),
        eval_rules=tuple(eval_rules),
        var_levels=tuple(float(v) for v in _getlist(cfg, "backtest", "var_levels")),
        es_levels=tuple(float(v) for v in _getlist(cfg, "backtest", "es_levels")),
        es_mc_draws=_getint(cfg, "backtest", "es_mc_draws", 100_000),
        chain=chain,
        warm_burn_in=warm,
        grid_size=_getint(cfg, "backtest", "grid_size", 1000),
        seed=seed,
        es_posterior=cfg.getboolean("backtest", "es_posterior", fallback=False),
        threads=threads,
    )
    model = _build_model(cfg, series, config.initial_window)
    report = bt.expanding_backtest(series, model, config)
    bt.write_report(report, outdir)
    if verbose:
        print(
            f"backtest: {len(report.windows)} windows, rules {update_rules}, "
            f"failures {report.failures}",
            file=sys.stderr,
        )
    return 0


def _load_forecast_file(path):
    """CSV with var and es columns (by header name, else first two numeric)."""
    if not os.path.exists(path):
        raise ConfigError(f"forecast file not found: {path}")
    with open(path, "r", encoding="utf-8") as fh:
        rows = [line.rstrip("\n").split(",") for line in fh if line.strip()]
    header = [h.strip().lower() for h in rows[0]]
    data = rows[1:]
    if "var" in header and "es" in header:
        vcol, ecol = header.index("var"), header.index("es")
    else:
        vcol, ecol = 0, 1
    try:
        var = np.array([float(r[vcol]) for r in data])
        es = np.array([float(r[ecol]) for r in data])
    except (ValueError, IndexError) as exc:
        raise InvalidInputError(f"{path}: cannot parse var/es columns: {exc}") from exc
    return var, es


def cmd_murphy(cfg, outdir, seed, verbose=False) -> int:
    if not cfg.has_section("murphy"):
        raise ConfigError("murphy requires a [murphy] section")
    _require(cfg, "murphy", ["forecasts_a", "forecasts_b", "actuals", "alpha"])
    var_a, es_a = _load_forecast_file(cfg.get("murphy", "forecasts_a"))
    var_b, es_b = _load_forecast_file(cfg.get("murphy", "forecasts_b"))
    actuals = _load_series(cfg.get("murphy", "actuals"))
    if actuals.size == 0:
        raise InvalidInputError("empty actuals file")
    if not (var_a.size == var_b.size == actuals.size):
        raise InvalidInputError(
            f"misaligned rows: A={var_a.size}, B={var_b.size}, actuals={actuals.size}"
        )
    alpha = _getfloat(cfg, "murphy", "alpha")
    sd = float(np.std(actuals)) or 1.0
    eta_lo = _getfloat(cfg, "murphy", "eta_min", float(actuals.min()) - sd)
    eta_hi = _getfloat(cfg, "murphy", "eta_max", float(actuals.max()) + sd)
    eta_points = _getint(cfg, "murphy", "eta_points", 101)
    block_len = _getint(cfg, "murphy", "block_len", 10)
    reps = _getint(cfg, "murphy", "replications", 1000)
    level = _getfloat(cfg, "murphy", "level", 0.95)
    grid = ev.murphy_diagram(
        var_a,
        es_a,
        var_b,
        es_b,
        actuals,
        alpha,
        np.linspace(eta_lo, eta_hi, eta_points),
        block_len=block_len,
        reps=reps,
        level=level,
        seed=derive_rng(seed, "murphy"),
    )
    note = f"alpha={alpha} block_len={block_len} replications={reps} level={level} seed={seed}"
    bt.write_murphy_csv(os.path.join(outdir, "murphy.csv"), grid, note)
    if verbose:
        print(f"murphy: wrote {eta_points} grid points", file=sys.stderr)
    return 0


def cmd_msis_batch(cfg, outdir, seed, threads=1, verbose=False) -> int:
    if not cfg.has_section("msis_batch"):
        raise ConfigError("msis-batch requires an [msis_batch] section")
    _require(cfg, "msis_batch", ["dir"])
    data_dir = cfg.get("msis_batch", "dir")
    if not os.path.isdir(data_dir):
        raise ConfigError(f"series directory not found: {data_dir}")
    files = sorted(f for f in os.listdir(data_dir) if f.endswith(".csv"))
    if not files:
        raise ConfigError(f"no .csv series files in {data_dir}")
    level = sc.IntervalLevel(
        alpha=_getfloat(cfg, "msis_batch", "alpha", 0.05),
        horizon_cap=_getint(cfg, "msis_batch", "horizon", 6),
    )
    m = _getint(cfg, "msis_batch", "m", 1)
    chain = post.ChainSettings(
        burn_in=_getint(cfg, "msis_batch", "burn_in", 1000),
        iters=_getint(cfg, "msis_batch", "iters", 4000),
        thin=_getint(cfg, "msis_batch", "thin", 2),
    )

    def run_one(fname):
        series = _load_series(os.path.join(data_dir, fname))
        return bt.msis_backtest(
            series, level, chain, seed=derive_seed(seed, "msis-batch", fname), m=m
        )

    results = {}
    failures = []
    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        def safe(fname):
            try:
                return fname, run_one(fname), None
            except Exception as exc:  # noqa: BLE001 - per-series isolation
                return fname, None, str(exc)

        with ThreadPoolExecutor(max_workers=threads) as pool:
            for fname, res, err in pool.map(safe, files):
                if res is None:
                    failures.append({"series": fname, "error": err})
                else:
                    results[fname] = res
    else:
        for fname in files:
            try:
                results[fname] = run_one(fname)
            except Exception as exc:  # noqa: BLE001 - per-series isolation
                failures.append({"series": fname, "error": str(exc)})

    rows = []
    for fname in files:
        if fname in results:
            r = results[fname]
            rows.append((fname, r.fbp_msis, r.mle_msis, r.trend, r.w, r.acceptance_rate))
    with open(os.path.join(outdir, "msis_results.csv"), "w", encoding="utf-8", newline="\n") as fh:
        fh.write("series,fbp_msis,mle_msis,trend,w,acceptance_rate\n")
        for row in rows:
            fh.write(
                f"{row[0]},{_FMT % row[1]},{_FMT % row[2]},{row[3]},{_FMT % row[4]},{_FMT % row[5]}\n"
            )

    def panel(values):
        values = np.asarray(values, dtype=float)
        out = {
            "mean": float(np.mean(values)),
            "median": float(np.median(values)),
            "sd": float(np.std(values, ddof=1)) if values.size > 1 else 0.0,
        }
        for q in (1, 10, 20, 30, 40, 50, 60, 70, 80, 90, 99):
            out[f"quant_{q}pct"] = float(np.quantile(values, q / 100.0))
        return out

    fbp_vals = [results[f].fbp_msis for f in files if f in results]
    mle_vals = [results[f].mle_msis for f in files if f in results]
    summary = {
        "seed": seed,
        "n_series": len(files),
        "n_succeeded": len(fbp_vals),
        "n_failed": len(failures),
        "failures": failures,
        "fbp": panel(fbp_vals) if fbp_vals else None,
        "mle_plugin": panel(mle_vals) if mle_vals else None,
    }
    with open(os.path.join(outdir, "msis_summary.json"), "w", encoding="utf-8", newline="\n") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    if verbose:
        print(f"msis-batch: {len(fbp_vals)} ok, {len(failures)} failed", file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------
# entry point


def _build_parser():
    parser = argparse.ArgumentParser(prog="scorebayes", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("simulate", "backtest", "murphy", "msis-batch"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="sectioned key-value config file")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--seed", type=int, default=None, help="master seed (overrides config)")
        p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
        p.add_argument("--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _load_config(args.config)
        seed = _resolve_seed(cfg, args)
        outdir = _resolve_outdir(cfg, args)
        os.makedirs(outdir, exist_ok=True)
        _echo_config(cfg, outdir, seed, args.command)
        if args.command == "simulate":
            return cmd_simulate(cfg, outdir, seed, verbose=args.verbose)
        if args.command == "backtest":
            return cmd_backtest(cfg, outdir, seed, threads=args.threads, verbose=args.verbose)
        if args.command == "murphy":
            return cmd_murphy(cfg, outdir, seed, verbose=args.verbose)
        if args.command == "msis-batch":
            return cmd_msis_batch(cfg, outdir, seed, threads=args.threads, verbose=args.verbose)
        raise ConfigError(f"unknown command {args.command!r}")
    except (ConfigError, InvalidInputError) as exc:
        print(json.dumps({"error": "validation", "message": str(exc)}), file=sys.stderr)
        return 2
    except (SamplerError, NumericalError, ConvergenceError, CalibrationError, DegenerateScaleError) as exc:
        print(json.dumps({"error": "numerical", "message": str(exc)}), file=sys.stderr)
        return 3
    except OSError as exc:
        print(json.dumps({"error": "io", "message": str(exc)}), file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
