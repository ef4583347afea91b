"""Acceptance suite: every criterion runs at its stated tolerance and prints
one PASS/FAIL line (run with ``pytest tests/test_acceptance.py -v -s``).

The desk-scale directional replication (criterion 6) dominates the runtime
at roughly 25 minutes; everything else completes within a few minutes.
"""

import json
import math
import time

import numpy as np
from scipy.integrate import quad
from scipy.stats import norm

import scorebayes.posterior as post
from scorebayes import (
    BacktestConfig,
    CensorRegion,
    ChainSettings,
    ExceedanceRecord,
    Gaussian,
    IntervalLevel,
    SvSkewConfig,
    block_bootstrap_ci,
    censored_score,
    christoffersen_test,
    crps,
    es_consistent_score,
    expanding_backtest,
    log_score,
    mean_predictive,
    msis_backtest,
    msis_scale_factor,
    msis_update_score,
    murphy_diagram,
    optimize_score,
    sample_arch,
    sample_garch,
    simulate_sv_skew,
    true_conditional_quantile,
)
from scorebayes.models import Arch1Class
from scorebayes.posterior import UNIT_W
from scorebayes.scoring import CensoredScoreRule, LogScoreRule, crps_gaussian, crps_quadrature
from scorebayes.utils import derive_rng, derive_seed

from conftest import simulate_arch, simulate_garch


def _report(cid, ok, detail=""):
    print(f"\n[criterion {cid:>2}] {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, f"criterion {cid} failed: {detail}"


# ---------------------------------------------------------------------------
# 1. scoring oracles


def test_criterion_01_scoring_oracles():
    t0 = time.time()
    rng = np.random.default_rng(101)
    errors = []

    # log score: listed examples plus randomized cases vs scipy
    errors.append(abs(log_score(Gaussian(0, 1), 0.0) - (-0.91894)) - 1e-5)
    errors.append(abs(log_score(Gaussian(0, 2), 0.0) - (-1.61209)) - 1e-5)
    for _ in range(50):
        mu, s = rng.normal(), rng.uniform(0.2, 2.0)
        y = rng.normal()
        errors.append(abs(log_score(Gaussian(mu, s), y) - norm.logpdf(y, mu, s)) - 1e-5)

    # censored score: listed examples plus randomized vs quadrature masses
    errors.append(abs(censored_score(Gaussian(0, 1), 1.0, CensorRegion(0.0, "below")) - math.log(0.5)) - 1e-5)
    errors.append(abs(censored_score(Gaussian(0, 1), -1.0, CensorRegion(0.0, "below")) - (-1.41894)) - 1e-5)
    for _ in range(50):
        mu, s = rng.normal(), rng.uniform(0.3, 2.0)
        thr, y = rng.normal(), rng.normal(scale=1.5)
        side = "below" if rng.random() < 0.5 else "above"
        region = CensorRegion(thr, side)
        got = censored_score(Gaussian(mu, s), y, region)
        if region.contains(y):
            want = norm.logpdf(y, mu, s)
        elif side == "below":
            want = math.log(quad(lambda t: norm.pdf(t, mu, s), thr, mu + 14 * s)[0])
        else:
            want = math.log(quad(lambda t: norm.pdf(t, mu, s), mu - 14 * s, thr)[0])
        errors.append(abs(got - want) - 1e-5)

    # CRPS: listed example plus closed form vs quadrature
    errors.append(abs(crps(Gaussian(0, 1), 0.0) - (-0.23370)) - 1e-5)
    for _ in range(50):
        mu, s = rng.normal(), rng.uniform(0.2, 3.0)
        y = mu + s * rng.normal(scale=1.5)
        errors.append(abs(crps_gaussian(mu, s, y) - crps_quadrature(Gaussian(mu, s), y)) - 1e-5)

    # interval update score: listed examples plus randomized brute force
    lvl = IntervalLevel(alpha=0.05)
    errors.append(abs(msis_update_score([-1.0], [1.0], [0.0], lvl) - (-2.0)) - 1e-5)
    errors.append(abs(msis_update_score([-1.0], [1.0], [2.0], lvl) - (-42.0)) - 1e-5)
    errors.append(abs(msis_update_score([-1, -2], [1, 2], [0, 0], lvl) - (-3.0)) - 1e-5)
    for _ in range(50):
        k = int(rng.integers(1, 7))
        lo = rng.normal(size=k) - 1.5
        hi = lo + rng.uniform(0.5, 3.0, size=k)
        y = rng.normal(size=k, scale=2.0)
        brute = 0.0
        for l, u, obs in zip(lo, hi, y):
            pen = u - l
            if obs < l:
                pen += 2 / 0.05 * (l - obs)
            if obs > u:
                pen += 2 / 0.05 * (obs - u)
            brute += pen
        errors.append(abs(msis_update_score(lo, hi, y, lvl) - (-brute / k)) - 1e-5)

    # consistent (VaR, ES) score: listed examples plus direct reimplementation
    errors.append(abs(es_consistent_score(-1.0, -2.0, 0.5, 0.1, 1.0) - 0.0) - 1e-5)
    errors.append(abs(es_consistent_score(-1.0, 2.0, -2.0, 0.1, 0.0) - (-11.0)) - 1e-5)
    for _ in range(50):
        v, e = rng.normal(), rng.normal()
        y, eta, a = rng.normal(), rng.normal(), rng.uniform(0.05, 0.5)
        want = -(eta <= e) * ((1 / a) * (y <= v) * (v - y) - (v - eta)) - (eta <= y) * (y - eta)
        errors.append(abs(es_consistent_score(v, e, y, a, eta) - want) - 1e-5)

    worst = max(errors)
    elapsed = time.time() - t0
    _report(1, worst < 0 and elapsed < 10, f"worst slack {worst:.2e}, {elapsed:.1f}s (<10s)")


# ---------------------------------------------------------------------------
# 2. properness


def test_criterion_02_properness():
    t0 = time.time()
    rng = np.random.default_rng(202)
    y = rng.standard_normal(100_000)
    truth = Gaussian(0, 1)
    distorted = (Gaussian(0.5, 1), Gaussian(0, 2))
    region = CensorRegion(-1.2815515655446004, "below")

    def cs_scores(g):
        out_mass = 1.0 - g.cdf(region.threshold)
        return np.where(y <= region.threshold, g.logpdf(y), math.log(out_mass))

    scorers = {
        "ls": lambda g: g.logpdf(y),
        "cs": cs_scores,
        "crps": lambda g: crps_gaussian(g.mu, g.sigma, y),
    }
    ok = True
    details = []
    for name, fn in scorers.items():
        s_true = fn(truth)
        for g in distorted:
            diff = s_true - fn(g)
            margin = diff.mean()
            se = diff.std(ddof=1) / math.sqrt(y.size)
            details.append(f"{name} vs N({g.mu},{g.sigma**2:.0f}): {margin / se:.1f} se")
            ok = ok and margin > 3.0 * se
    elapsed = time.time() - t0
    _report(2, ok and elapsed < 60, "; ".join(details) + f"; {elapsed:.1f}s (<1min)")


# ---------------------------------------------------------------------------
# 3. exact-Bayes reduction + simulation consistency


def test_criterion_03_simulation_consistency():
    t0 = time.time()
    arch_truth = np.array([0.0, 0.5, 0.3])
    y_arch = simulate_arch(tuple(arch_truth), 5000, seed=33001)
    d_arch = sample_arch(
        y_arch, LogScoreRule(), UNIT_W, ChainSettings(burn_in=3000, iters=12000, thin=6), seed=331
    )
    z_arch = np.abs((d_arch.mean() - arch_truth) / d_arch.sd())

    garch_truth = np.array([0.0, 0.05, 0.1, 0.85])
    y_garch = simulate_garch(tuple(garch_truth), 5000, seed=33002)
    d_garch = sample_garch(
        y_garch, LogScoreRule(), UNIT_W, ChainSettings(burn_in=4000, iters=16000, thin=8), seed=332
    )
    z_garch = np.abs((d_garch.mean() - garch_truth) / d_garch.sd())

    elapsed = time.time() - t0
    ok = np.all(z_arch < 3.0) and np.all(z_garch < 3.0) and elapsed < 600
    _report(
        3,
        ok,
        f"ARCH |z| max {z_arch.max():.2f}, GARCH |z| max {z_garch.max():.2f}, "
        f"{elapsed:.0f}s (<10min)",
    )


# ---------------------------------------------------------------------------
# 4. posterior concentration at root-n rate


def test_criterion_04_concentration():
    t0 = time.time()
    y = simulate_arch((0.0, 0.5, 0.3), 4000, seed=777)
    settings = ChainSettings(burn_in=3000, iters=20000, thin=10)
    d1 = sample_arch(y[:1000], LogScoreRule(), UNIT_W, settings, seed=41)
    d4 = sample_arch(y[:4000], LogScoreRule(), UNIT_W, settings, seed=42)
    ratio = d1.sd()[2] / d4.sd()[2]
    elapsed = time.time() - t0
    ok = 1.5 <= ratio <= 2.7 and elapsed < 900
    _report(4, ok, f"theta3 posterior-sd ratio {ratio:.3f} in [1.5, 2.7], {elapsed:.0f}s (<15min)")


# ---------------------------------------------------------------------------
# 5. merging of the posterior mean predictive and the plug-in


def test_criterion_05_merging():
    t0 = time.time()
    y = simulate_arch((0.0, 0.5, 0.3), 8000, seed=777)
    settings = ChainSettings(burn_in=3000, iters=20000, thin=10)
    model = Arch1Class()
    ok = True
    details = []
    for rule in (LogScoreRule(), CensoredScoreRule("above", 0.9)):
        tvs = []
        for n in (500, 2000, 8000):
            window = y[:n]
            d = sample_arch(window, rule, UNIT_W, settings, seed=100 + n)
            mp = model.mean_predictive(d.draws, window)
            theta_hat = optimize_score(model, window, rule)
            plug = model.predictive(theta_hat, window)
            grid = np.linspace(mp.mean() - 12 * mp.sd(), mp.mean() + 12 * mp.sd(), 2001)
            tvs.append(0.5 * float(np.trapezoid(np.abs(mp.pdf(grid) - plug.pdf(grid)), grid)))
        monotone = tvs[0] > tvs[1] > tvs[2]
        ok = ok and monotone and tvs[-1] < 0.05
        details.append(f"{rule.id}: TV {['%.4f' % t for t in tvs]}")
    elapsed = time.time() - t0
    ok = ok and elapsed < 1200
    _report(5, ok, "; ".join(details) + f"; {elapsed:.0f}s (<20min)")


# ---------------------------------------------------------------------------
# 6. desk-scale directional replication of the focused-update table


def test_criterion_06_toy_directional_replication():
    t0 = time.time()
    rules = ("ls", "cs<10", "cs>90")
    seeds = (1001, 1002, 1003, 1004, 1005)
    wins_a = wins_b = wins_c = 0
    for seed in seeds:
        y, _ = simulate_sv_skew(SvSkewConfig(), 701, seed=seed)
        config = BacktestConfig(
            initial_window=300,
            steps=400,
            update_rules=rules,
            eval_rules=rules,
            chain=ChainSettings(burn_in=1500, iters=4000, thin=2),
            warm_burn_in=250,
            seed=seed,
        )
        rep = expanding_backtest(y, Arch1Class(), config)
        avg = rep.avg_scores
        wins_a += avg["cs>90"]["cs>90"] > avg["ls"]["cs>90"]
        wins_b += avg["cs<10"]["cs<10"] > avg["ls"]["cs<10"]
        wins_c += avg["ls"]["ls"] > max(avg["cs<10"]["ls"], avg["cs>90"]["ls"])
    elapsed = time.time() - t0
    ok = wins_a >= 4 and wins_b >= 4 and wins_c >= 4 and elapsed < 7200
    _report(
        6,
        ok,
        f"orderings out of 5 seeds: upper-tail {wins_a}, lower-tail {wins_b}, "
        f"log-score {wins_c} (each needs >=4); {elapsed:.0f}s (<2h)",
    )


# ---------------------------------------------------------------------------
# 7. VaR pipeline at nominal size


def test_criterion_07_var_pipeline():
    t0 = time.time()
    cfg = SvSkewConfig()
    alpha = 0.1
    band = 2.0 * math.sqrt(alpha * (1 - alpha) / 2000)
    passes = 0
    for seed in range(100):
        y, h = simulate_sv_skew(cfg, 2001, seed=9000 + seed)
        q = true_conditional_quantile(cfg, h[:-1], alpha)
        hits = (y[1:] < q).astype(int)
        res = christoffersen_test(ExceedanceRecord(hits, alpha))
        if abs(hits.mean() - alpha) < band and not res.reject_at_1pct:
            passes += 1

    zeros = christoffersen_test(ExceedanceRecord(np.zeros(100, dtype=int), 0.1))
    lr_ok = abs(zeros.lr_uc - 21.07) < 0.01

    elapsed = time.time() - t0
    ok = passes >= 95 and lr_ok and elapsed < 300
    _report(
        7,
        ok,
        f"{passes}/100 seeds within band and non-rejecting (needs >=95); "
        f"100-zeros LR_uc {zeros.lr_uc:.3f} (21.07 +/- 0.01); {elapsed:.0f}s (<5min)",
    )


# ---------------------------------------------------------------------------
# 8. Murphy diagram and block bootstrap


def test_criterion_08_murphy_bootstrap():
    t0 = time.time()
    rng = np.random.default_rng(808)
    T = 1000
    actuals = rng.standard_normal(T)
    var_a, es_a = np.full(T, -1.2816), np.full(T, 1.7550)
    var_b, es_b = np.full(T, -2.5631), np.full(T, 3.5100)
    etas = np.linspace(-4, 4, 33)

    same = murphy_diagram(var_a, es_a, var_a, es_a, actuals, 0.1, etas)
    zero_ok = np.all(same.deltas == 0.0)

    ab = murphy_diagram(var_a, es_a, var_b, es_b, actuals, 0.1, etas)
    ba = murphy_diagram(var_b, es_b, var_a, es_a, actuals, 0.1, etas)
    anti_ok = np.array_equal(ab.deltas, -ba.deltas)

    x = rng.standard_normal(T)
    lo, hi = block_bootstrap_ci(x, block_len=10, reps=1000, seed=3)
    clt_width = 2.0 * 1.959963984540054 / math.sqrt(T)
    width_ok = abs((hi - lo) - clt_width) / clt_width < 0.25 and lo <= x.mean() <= hi

    elapsed = time.time() - t0
    ok = zero_ok and anti_ok and width_ok and elapsed < 120
    _report(
        8,
        ok,
        f"identical-methods zero: {zero_ok}, antisymmetry: {anti_ok}, "
        f"CI width {(hi - lo):.4f} vs CLT {clt_width:.4f}; {elapsed:.0f}s (<2min)",
    )


# ---------------------------------------------------------------------------
# 9. interval-score updating of the ETS class


def _annual_series(seed):
    rng = derive_rng(seed, "annual-series")
    n = int(rng.integers(24, 45))
    level0 = rng.uniform(20, 200)
    drift = rng.normal(0, 2.0)
    curve = rng.normal(0, 0.02)
    noise_sd = rng.uniform(0.5, 4.0)
    phi = rng.uniform(0.0, 0.6)
    innov = rng.standard_normal(n) * noise_sd
    e = np.zeros(n)
    for t in range(1, n):
        e[t] = phi * e[t - 1] + innov[t]
    t = np.arange(n)
    return level0 + drift * t + curve * t**2 + e


def test_criterion_09_msis_ets_pipeline():
    t0 = time.time()
    level = IntervalLevel(0.05, 6)
    fbp, mle = [], []
    for s in range(200):
        y = _annual_series(s)
        res = msis_backtest(y, level, seed=derive_seed(0, "c9", s))
        fbp.append(res.fbp_msis)
        mle.append(res.mle_msis)
    diff = np.array(fbp) - np.array(mle)

    rng = np.random.default_rng(909)
    boot_means = np.array(
        [diff[rng.integers(0, diff.size, diff.size)].mean() for _ in range(1000)]
    )
    se = boot_means.std(ddof=1)
    mean_diff = diff.mean()
    band_ok = mean_diff >= -se

    formula_ok = msis_scale_factor(50, 3, -75.0) == 1.0

    elapsed = time.time() - t0
    ok = band_ok and formula_ok and elapsed < 1800
    _report(
        9,
        ok,
        f"mean focused-minus-plug-in {mean_diff:+.3f} (bootstrap se {se:.3f}, needs >= -se); "
        f"w(50,3,-75)=1 exact: {formula_ok}; {elapsed:.0f}s (<30min)",
    )


# ---------------------------------------------------------------------------
# 10. byte-level determinism of every command


def test_criterion_10_cli_determinism(tmp_path):
    import textwrap

    from scorebayes.cli import main

    t0 = time.time()

    def run_twice(command, cfg_text, files):
        cfg = tmp_path / f"{command}.cfg"
        cfg.write_text(textwrap.dedent(cfg_text), encoding="utf-8")
        outs = []
        for tag in ("r1", "r2"):
            out = tmp_path / f"{command}-{tag}"
            assert main([command, "--config", str(cfg), "--out", str(out)]) == 0
            outs.append(out)
        for name in files:
            a = (outs[0] / name).read_bytes()
            b = (outs[1] / name).read_bytes()
            assert a == b, f"{command}/{name} differs between reruns"

    run_twice(
        "simulate",
        """
        [run]
        seed = 404
        [dgp]
        n = 200
        fz_sample_size = 100000
        latent = true
        """,
        ("series.csv", "latent.csv", "config_echo.txt"),
    )

    series = tmp_path / "series.csv"
    y = simulate_arch((0.0, 0.5, 0.3), 70, seed=404)
    series.write_text("y\n" + "\n".join(f"{v:.17g}" for v in y), encoding="utf-8")
    run_twice(
        "backtest",
        f"""
        [run]
        seed = 405
        [data]
        path = {series}
        [model]
        class = arch
        [backtest]
        initial_window = 60
        steps = 2
        update_rules = ls, cs>90
        eval_rules = ls, cs>90
        var_levels = 0.1
        es_levels = 0.1
        es_mc_draws = 20000
        [chain]
        burn_in = 150
        iters = 300
        thin = 3
        warm_burn_in = 60
        """,
        ("scores.csv", "cumavg.csv", "exceedances.csv", "es_forecasts.csv", "summary.json"),
    )

    fc_a = tmp_path / "fa.csv"
    fc_b = tmp_path / "fb.csv"
    acts = tmp_path / "acts.csv"
    rng = np.random.default_rng(406)
    fc_a.write_text("var,es\n" + "\n".join("-1.28,1.75" for _ in range(40)), encoding="utf-8")
    fc_b.write_text("var,es\n" + "\n".join("-2.56,3.51" for _ in range(40)), encoding="utf-8")
    acts.write_text("y\n" + "\n".join(f"{v:.17g}" for v in rng.standard_normal(40)), encoding="utf-8")
    run_twice(
        "murphy",
        f"""
        [run]
        seed = 407
        [murphy]
        forecasts_a = {fc_a}
        forecasts_b = {fc_b}
        actuals = {acts}
        alpha = 0.1
        """,
        ("murphy.csv", "config_echo.txt"),
    )

    annual = tmp_path / "annual"
    annual.mkdir()
    for i in range(2):
        ya = _annual_series(500 + i)
        (annual / f"s{i}.csv").write_text(
            "y\n" + "\n".join(f"{v:.17g}" for v in ya), encoding="utf-8"
        )
    run_twice(
        "msis-batch",
        f"""
        [run]
        seed = 408
        [msis_batch]
        dir = {annual}
        burn_in = 150
        iters = 400
        thin = 2
        """,
        ("msis_results.csv", "msis_summary.json"),
    )

    elapsed = time.time() - t0
    _report(10, True, f"simulate/backtest/murphy/msis-batch reruns byte-identical; {elapsed:.0f}s")
