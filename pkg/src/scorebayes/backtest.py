"""Expanding-window backtests of the score-updated posteriors, and the
multi-horizon interval backtest for the ETS class.

Each update rule runs its own warm-started chain sequence over the
expanding windows; distinct update rules are independent (their seeds
derive from the master seed and the rule identifier) and may execute in
parallel without changing any output.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import evaluation as ev
from . import models as _models
from . import posterior as post
from . import scoring as sc
from .utils import (
    CalibrationError,
    InvalidInputError,
    NumericalError,
    SamplerError,
    derive_rng,
    derive_seed,
)

__all__ = [
    "BacktestConfig",
    "EvaluationReport",
    "expanding_backtest",
    "MsisBacktestResult",
    "msis_backtest",
    "write_report",
    "write_murphy_csv",
]


@dataclass
class BacktestConfig:
    initial_window: int = 500
    steps: int | None = None
    final: int | None = None
    update_rules: tuple = ("ls",)
    eval_rules: tuple = ("ls",)
    var_levels: tuple = ()
    es_levels: tuple = ()
    es_mc_draws: int = 100_000
    chain: post.ChainSettings = field(default_factory=post.ChainSettings)
    warm_burn_in: int | None = None
    grid_size: int = 1000
    seed: int = 0
    es_posterior: bool = False
    max_failure_rate: float = 0.05
    msis_level: sc.IntervalLevel = field(default_factory=sc.IntervalLevel)
    threads: int = 1

    def resolve_final(self, n_obs: int) -> int:
        if self.final is not None:
            final = self.final
        elif self.steps is not None:
            final = self.initial_window + self.steps
        else:
            final = n_obs
        if self.initial_window < 30:
            raise InvalidInputError("initial window must hold at least 30 observations")
        if final > n_obs:
            raise InvalidInputError(
                f"final index {final} exceeds the series length {n_obs}"
            )
        if final <= self.initial_window:
            raise InvalidInputError("no forecast windows: final <= initial_window")
        return final


@dataclass
class EvaluationReport:
    windows: np.ndarray
    actuals: np.ndarray
    update_rules: tuple
    eval_rules: tuple
    scores: dict
    cumavg: dict
    avg_scores: dict
    var_forecasts: dict
    exceedances: dict
    christoffersen: dict
    es_forecasts: dict
    es_raw_forecasts: dict
    w_values: dict
    failures: dict
    invalid: bool
    seed: int
    config_echo: dict
    es_posterior_density: dict = field(default_factory=dict)


def _nan_cumavg(x):
    ok = ~np.isnan(x)
    filled = np.where(ok, x, 0.0)
    counts = np.cumsum(ok)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.cumsum(filled) / np.where(counts > 0, counts, np.nan)


def _unit_or_calibrated(rule):
    if isinstance(rule, (sc.LogScoreRule, sc.CensoredScoreRule)):
        return "unit"
    if isinstance(rule, sc.CrpsRule):
        return "crps_ratio"
    if isinstance(rule, sc.MsisRule):
        return "msis_formula"
    raise InvalidInputError(f"no scale-factor policy for rule {rule.id!r}")


def _run_update_rule(series, model, config, final, rule_id):
    """Sequential expanding-window run of a single update rule."""
    rule = sc.parse_rule(rule_id, msis_level=config.msis_level)
    w_policy = _unit_or_calibrated(rule)
    windows = np.arange(config.initial_window, final)
    n_win = windows.size
    out = {
        "scores": {e: np.full(n_win, np.nan) for e in config.eval_rules},
        "var": {lvl: np.full(n_win, np.nan) for lvl in config.var_levels},
        "es": {lvl: np.full(n_win, np.nan) for lvl in config.es_levels},
        "es_raw": {lvl: np.full(n_win, np.nan) for lvl in config.es_levels},
        "w": np.full(n_win, np.nan),
        "failures": 0,
        "final_draws": None,
    }
    eval_rules = {e: sc.parse_rule(e, msis_level=config.msis_level) for e in config.eval_rules}
    warm_theta = None
    warm_theta_ls = None
    base_chain = config.chain
    for i, nwin in enumerate(windows):
        window = series[:nwin]
        settings = base_chain
        if i > 0 and config.warm_burn_in is not None:
            settings = replace(base_chain, burn_in=config.warm_burn_in)
        try:
            if w_policy == "crps_ratio":
                ls_draws = post.sample_posterior(
                    model,
                    window,
                    sc.LogScoreRule(),
                    post.UNIT_W,
                    settings,
                    seed=derive_seed(config.seed, "backtest", rule.id, "ls-ref", int(nwin)),
                    init=warm_theta_ls,
                )
                warm_theta_ls = ls_draws.draws[-1]
                w = post.calibrate_w_crps(model, window, ls_draws=ls_draws)
            else:
                w = post.UNIT_W
            draws = post.sample_posterior(
                model,
                window,
                rule,
                w,
                settings,
                seed=derive_seed(config.seed, "backtest", rule.id, int(nwin)),
                init=warm_theta,
                grid_size=config.grid_size,
            )
        except (SamplerError, NumericalError, CalibrationError) as exc:
            out["failures"] += 1
            out.setdefault("failure_messages", []).append(f"window {nwin}: {exc}")
            continue
        warm_theta = draws.draws[-1]
        out["w"][i] = w.w
        mp = ev.mean_predictive(model, draws, window)
        y_next = float(series[nwin])
        for e, erule in eval_rules.items():
            out["scores"][e][i] = _score_mean_predictive(mp, y_next, erule, window)
        for lvl in config.var_levels:
            out["var"][lvl][i] = ev.mean_predictive_quantile(mp, lvl)
        for lvl in config.es_levels:
            tail = "lower" if lvl < 0.5 else "upper"
            es = ev.mean_predictive_es(
                mp,
                lvl,
                tail,
                config.es_mc_draws,
                seed=derive_rng(config.seed, "backtest", rule.id, "es", int(nwin)),
            )
            out["es"][lvl][i] = es
            out["es_raw"][lvl][i] = -es if tail == "lower" else es
        if config.es_posterior and nwin == windows[-1]:
            out["final_draws"] = draws
    return out


def _score_mean_predictive(mp, y, rule, window):
    if isinstance(rule, sc.LogScoreRule):
        return sc.log_score(mp, y)
    if isinstance(rule, sc.CensoredScoreRule):
        return sc.censored_score(mp, y, rule.region_for(window))
    if isinstance(rule, sc.CrpsRule):
        return sc.crps(mp, y)
    raise InvalidInputError(f"rule {rule.id!r} cannot score a one-step forecast")


def expanding_backtest(series, model, config: BacktestConfig) -> EvaluationReport:
    """Expanding-window forecast study for one predictive class.

    For every window and update rule: calibrate the scale factor, sample the
    posterior (warm-started from the previous window), form the mean
    predictive of the next observation and record every evaluation rule's
    score plus the configured VaR and ES forecasts. Sampler failures skip
    the window; a failure share above ``max_failure_rate`` flags the report
    invalid.
    """
    y = np.asarray(series, dtype=float)
    final = config.resolve_final(y.size)
    windows = np.arange(config.initial_window, final)
    actuals = y[windows]

    seq = list(config.update_rules)
    if config.threads > 1 and len(seq) > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            results = dict(
                zip(seq, pool.map(lambda r: _run_update_rule(y, model, config, final, r), seq))
            )
    else:
        results = {r: _run_update_rule(y, model, config, final, r) for r in seq}

    scores = {r: results[r]["scores"] for r in seq}
    cumavg = {r: {e: _nan_cumavg(scores[r][e]) for e in config.eval_rules} for r in seq}
    avg_scores = {
        r: {e: float(np.nanmean(scores[r][e])) for e in config.eval_rules} for r in seq
    }
    var_forecasts = {r: results[r]["var"] for r in seq}
    exceedances = {}
    christoffersen = {}
    for r in seq:
        exceedances[r] = {}
        christoffersen[r] = {}
        for lvl in config.var_levels:
            q = var_forecasts[r][lvl]
            ok = ~np.isnan(q)
            if lvl < 0.5:
                hits = (actuals[ok] < q[ok]).astype(int)
                nominal = lvl
                tail = "lower"
            else:
                hits = (actuals[ok] > q[ok]).astype(int)
                nominal = 1.0 - lvl
                tail = "upper"
            rec = ev.ExceedanceRecord(hits, nominal, tail)
            exceedances[r][lvl] = rec
            christoffersen[r][lvl] = (
                ev.christoffersen_test(rec) if rec.hits.size >= 20 else None
            )

    failures = {r: results[r]["failures"] for r in seq}
    n_win = windows.size
    invalid = any(c > config.max_failure_rate * n_win for c in failures.values())

    es_density = {}
    if config.es_posterior:
        for r in seq:
            draws = results[r]["final_draws"]
            if draws is None:
                continue
            for lvl in config.es_levels:
                tail = "lower" if lvl < 0.5 else "upper"
                vals = ev.es_posterior_distribution(
                    model, draws, y[: windows[-1]], lvl, tail
                )
                es_density[(r, lvl)] = ev.kde_density(vals, n_grid=201)

    return EvaluationReport(
        windows=windows,
        actuals=actuals,
        update_rules=tuple(seq),
        eval_rules=tuple(config.eval_rules),
        scores=scores,
        cumavg=cumavg,
        avg_scores=avg_scores,
        var_forecasts=var_forecasts,
        exceedances=exceedances,
        christoffersen=christoffersen,
        es_forecasts={r: results[r]["es"] for r in seq},
        es_raw_forecasts={r: results[r]["es_raw"] for r in seq},
        w_values={r: results[r]["w"] for r in seq},
        failures=failures,
        invalid=invalid,
        seed=config.seed,
        config_echo=_config_echo(config),
        es_posterior_density=es_density,
    )


def _config_echo(config: BacktestConfig) -> dict:
    echo = {
        "initial_window": config.initial_window,
        "steps": config.steps,
        "final": config.final,
        "update_rules": list(config.update_rules),
        "eval_rules": list(config.eval_rules),
        "var_levels": list(config.var_levels),
        "es_levels": list(config.es_levels),
        "es_mc_draws": config.es_mc_draws,
        "chain": {
            "burn_in": config.chain.burn_in,
            "iters": config.chain.iters,
            "thin": config.chain.thin,
            "step_init": config.chain.step_init,
        },
        "warm_burn_in": config.warm_burn_in,
        "grid_size": config.grid_size,
        "seed": config.seed,
        "msis_alpha": config.msis_level.alpha,
        "msis_horizon": config.msis_level.horizon_cap,
    }
    return echo


# ---------------------------------------------------------------------------
# ETS / interval backtest


@dataclass
class MsisBacktestResult:
    fbp_msis: float
    mle_msis: float
    trend: str
    w: float
    acceptance_rate: float
    lower: np.ndarray
    upper: np.ndarray
    mle_lower: np.ndarray
    mle_upper: np.ndarray
    holdout: np.ndarray


def msis_backtest(
    series,
    level: sc.IntervalLevel | None = None,
    chain: post.ChainSettings | None = None,
    seed: int = 0,
    m: int = 1,
) -> MsisBacktestResult:
    """Interval backtest of the focused ETS update against the plug-in fit.

    The final ``horizon_cap`` observations are held out; the ETS spec is
    selected and fitted on the training part, the interval-score posterior
    sampled with the formula-based scale factor, and the competition-style
    scaled interval score computed for both the posterior mean predictive and
    the fitted plug-in predictive.
    """
    level = level or sc.IntervalLevel()
    y = np.asarray(series, dtype=float)
    horizon = level.horizon_cap
    if y.size < 12 or y.size - horizon < 8:
        raise InvalidInputError("series too short for the interval backtest")
    train, holdout = y[:-horizon], y[-horizon:]
    spec = _models.ets_select_and_fit(train)
    w = post.calibrate_w_msis(train, spec, level)
    model = _models.EtsClass(spec)
    chain = chain or post.ChainSettings(burn_in=1000, iters=4000, thin=2)
    draws = post.sample_ets(
        train, spec, sc.MsisRule(level), w, chain, seed=derive_seed(seed, "msis-chain")
    )
    mixtures = model.horizon_mixtures(draws.draws, train, horizon)
    lower = np.array([ev.mean_predictive_quantile(mx, level.alpha / 2.0) for mx in mixtures])
    upper = np.array(
        [ev.mean_predictive_quantile(mx, 1.0 - level.alpha / 2.0) for mx in mixtures]
    )
    fbp = sc.msis_competition(train, lower, upper, holdout, level.alpha, m)

    mle_preds = [_models.ets_predictive(spec, h) for h in range(1, horizon + 1)]
    mle_lower = np.array([p.ppf(level.alpha / 2.0) for p in mle_preds])
    mle_upper = np.array([p.ppf(1.0 - level.alpha / 2.0) for p in mle_preds])
    mle = sc.msis_competition(train, mle_lower, mle_upper, holdout, level.alpha, m)

    return MsisBacktestResult(
        fbp_msis=fbp,
        mle_msis=mle,
        trend=spec.trend,
        w=w.w,
        acceptance_rate=draws.acceptance_rate,
        lower=lower,
        upper=upper,
        mle_lower=mle_lower,
        mle_upper=mle_upper,
        holdout=holdout,
    )


# ---------------------------------------------------------------------------
# report persistence


_FMT = "%.17g"


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        if np.isnan(x):
            return "nan"
        return _FMT % x
    return str(x)


def _write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_report(report: EvaluationReport, outdir):
    """Persist the CSV/JSON suite of an expanding backtest."""
    import os

    os.makedirs(outdir, exist_ok=True)

    rows = []
    for r in report.update_rules:
        for e in report.eval_rules:
            for i, wdx in enumerate(report.windows):
                rows.append((int(wdx), r, e, report.scores[r][e][i]))
    _write_csv(
        os.path.join(outdir, "scores.csv"),
        ("window", "update_rule", "eval_rule", "score"),
        rows,
    )

    rows = []
    for r in report.update_rules:
        for e in report.eval_rules:
            for i, wdx in enumerate(report.windows):
                rows.append((int(wdx), r, e, report.cumavg[r][e][i]))
    _write_csv(
        os.path.join(outdir, "cumavg.csv"),
        ("window", "update_rule", "eval_rule", "cumulative_average"),
        rows,
    )

    rows = []
    for r in report.update_rules:
        for lvl, rec in report.exceedances[r].items():
            q = report.var_forecasts[r][lvl]
            ok_idx = np.flatnonzero(~np.isnan(q))
            for j, i in enumerate(ok_idx):
                rows.append(
                    (
                        int(report.windows[i]),
                        r,
                        lvl,
                        q[i],
                        report.actuals[i],
                        int(rec.hits[j]),
                    )
                )
    _write_csv(
        os.path.join(outdir, "exceedances.csv"),
        ("window", "update_rule", "level", "var_forecast", "actual", "hit"),
        rows,
    )

    rows = []
    for r in report.update_rules:
        for lvl in report.es_forecasts[r]:
            es = report.es_forecasts[r][lvl]
            es_raw = report.es_raw_forecasts[r][lvl]
            q = report.var_forecasts[r].get(lvl)
            for i, wdx in enumerate(report.windows):
                var_val = q[i] if q is not None else float("nan")
                rows.append((int(wdx), r, lvl, var_val, es[i], es_raw[i]))
    _write_csv(
        os.path.join(outdir, "es_forecasts.csv"),
        ("window", "update_rule", "level", "var_forecast", "es", "es_raw"),
        rows,
    )

    if report.es_posterior_density:
        rows = []
        for (r, lvl), (grid, dens) in report.es_posterior_density.items():
            for g, d in zip(grid, dens):
                rows.append((r, lvl, g, d))
        _write_csv(
            os.path.join(outdir, "es_posterior_density.csv"),
            ("update_rule", "level", "es_value", "density"),
            rows,
        )

    summary = {
        "seed": report.seed,
        "config": report.config_echo,
        "average_scores": report.avg_scores,
        "exceedance_rates": {
            r: {str(lvl): ev.var_exceedance(rec) for lvl, rec in report.exceedances[r].items()}
            for r in report.update_rules
        },
        "christoffersen": {
            r: {
                str(lvl): (
                    None
                    if res is None
                    else {
                        "lr_uc": res.lr_uc,
                        "lr_ind": res.lr_ind,
                        "lr_cc": res.lr_cc,
                        "reject_at_1pct": res.reject_at_1pct,
                    }
                )
                for lvl, res in report.christoffersen[r].items()
            }
            for r in report.update_rules
        },
        "failures": report.failures,
        "invalid": report.invalid,
    }
    with open(os.path.join(outdir, "summary.json"), "w", encoding="utf-8", newline="\n") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_murphy_csv(path, grid: ev.MurphyGrid, header_note: str = ""):
    """Persist a Murphy grid; an optional note (bootstrap settings) goes into
    a leading comment line."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if header_note:
            fh.write(f"# {header_note}\n")
        fh.write("eta,delta,ci_lower,ci_upper\n")
        for e, d, lo, hi in zip(grid.etas, grid.deltas, grid.ci_lower, grid.ci_upper):
            fh.write(f"{_FMT % e},{_FMT % d},{_FMT % lo},{_FMT % hi}\n")
