import numpy as np
import pytest
from scipy.stats import ks_2samp

from scorebayes import (
    InvalidInputError,
    SvSkewConfig,
    simulate_sv_skew,
    std_skew_normal,
    true_conditional_predictive,
    true_conditional_quantile,
)
from scorebayes.evaluation import sample_es


FAST_FZ = dict(fz_sample_size=200_000)


def _jarque_bera(x):
    n = x.size
    z = (x - x.mean()) / x.std()
    skew = np.mean(z**3)
    kurt = np.mean(z**4) - 3.0
    return n / 6.0 * (skew**2 + kurt**2 / 4.0)


def _ljung_box(x, lags=3):
    n = x.size
    xc = x - x.mean()
    denom = np.sum(xc**2)
    stat = 0.0
    for k in range(1, lags + 1):
        rho = np.sum(xc[k:] * xc[:-k]) / denom
        stat += rho**2 / (n - k)
    return n * (n + 2) * stat


def test_config_defaults_and_validation():
    cfg = SvSkewConfig()
    assert cfg.a == 0.9 and cfg.h_bar == -0.4581 and cfg.sigma_h == 0.4173
    assert cfg.gamma == -5.0
    with pytest.raises(InvalidInputError):
        SvSkewConfig(a=1.0)
    with pytest.raises(InvalidInputError):
        SvSkewConfig(fz_sample_size=10)


def test_collapse_case_is_iid_standard_normal():
    # constant volatility and no skew: the inversion chain is the identity
    cfg = SvSkewConfig(a=0.0, sigma_h=0.0, gamma=0.0, **FAST_FZ)
    crit_1pct = 9.21034  # chi-square(2)
    passes = 0
    for seed in range(100):
        y, _ = simulate_sv_skew(cfg, 10_000, seed=seed)
        if _jarque_bera(y) < crit_1pct:
            passes += 1
    assert passes >= 95


def test_negative_shape_gives_negative_skewness():
    cfg = SvSkewConfig(**FAST_FZ)
    y, _ = simulate_sv_skew(cfg, 100_000, seed=5)
    z = (y - y.mean()) / y.std()
    assert np.mean(z**3) < 0.0


def test_volatility_clustering_survives_inversion():
    cfg = SvSkewConfig(**FAST_FZ)
    y, _ = simulate_sv_skew(cfg, 2500, seed=7)
    lb = _ljung_box(y**2, lags=3)
    assert lb > 7.815  # chi-square(3) at 5%


def test_simulation_deterministic():
    cfg = SvSkewConfig(**FAST_FZ)
    y1, h1 = simulate_sv_skew(cfg, 500, seed=9)
    y2, h2 = simulate_sv_skew(cfg, 500, seed=9)
    assert np.array_equal(y1, y2) and np.array_equal(h1, h2)


def test_marginal_matches_skew_normal_ks():
    cfg = SvSkewConfig(**FAST_FZ)
    base = std_skew_normal(cfg.gamma)
    passes = 0
    for seed in range(100):
        y, _ = simulate_sv_skew(cfg, 4000, seed=1000 + seed)
        direct = base.rvs(4000, np.random.default_rng(seed))
        if ks_2samp(y, direct).pvalue > 0.01:
            passes += 1
    assert passes >= 95


def test_latent_path_stationarity():
    cfg = SvSkewConfig(**FAST_FZ)
    _, h = simulate_sv_skew(cfg, 100_000, seed=11)
    # AR(1) sample-mean standard error: sd * sqrt((1+a)/((1-a) n))
    se = cfg.h_stationary_sd * np.sqrt((1 + cfg.a) / ((1 - cfg.a) * h.size))
    assert abs(h.mean() - cfg.h_bar) < 3.0 * se


def test_true_predictive_collapse_case():
    cfg = SvSkewConfig(a=0.0, sigma_h=0.0, gamma=0.0, **FAST_FZ)
    sample = true_conditional_predictive(cfg, cfg.h_bar, 1_000_000, seed=3)
    assert abs(sample.mean()) < 3.0 / np.sqrt(1e6) * 1.1
    assert abs(sample.std() - 1.0) < 0.02
    assert abs(sample_es(sample, 0.1, "lower") - 1.755) < 0.02


def test_true_predictive_deterministic():
    cfg = SvSkewConfig(**FAST_FZ)
    a = true_conditional_predictive(cfg, -0.5, 10_000, seed=4)
    b = true_conditional_predictive(cfg, -0.5, 10_000, seed=4)
    assert np.array_equal(a, b)


def test_conditional_quantile_matches_monte_carlo():
    cfg = SvSkewConfig(**FAST_FZ)
    for h_n, p in ((-0.5, 0.1), (0.2, 0.9), (-1.0, 0.5)):
        sample = true_conditional_predictive(cfg, h_n, 400_000, seed=6)
        mc_q = float(np.quantile(sample, p))
        gh_q = true_conditional_quantile(cfg, h_n, p)
        assert abs(gh_q - mc_q) < 0.02


def test_conditional_quantile_exceedance_is_nominal():
    # hits of the exact conditional quantile are iid Bernoulli(p)
    cfg = SvSkewConfig(**FAST_FZ)
    y, h = simulate_sv_skew(cfg, 4001, seed=13)
    q = true_conditional_quantile(cfg, h[:-1], 0.1)
    hits = (y[1:] < q).astype(int)
    assert abs(hits.mean() - 0.1) < 2.0 * np.sqrt(0.1 * 0.9 / 4000)


def test_simulate_validates_n():
    with pytest.raises(InvalidInputError):
        simulate_sv_skew(SvSkewConfig(**FAST_FZ), 0, seed=1)


def test_exceedance_pipeline_with_monte_carlo_quantiles():
    # oracle quantiles from the Monte-Carlo predictive keep nominal coverage
    cfg = SvSkewConfig(**FAST_FZ)
    y, h = simulate_sv_skew(cfg, 501, seed=21)
    hits = np.empty(500, dtype=int)
    for t in range(500):
        sample = true_conditional_predictive(cfg, h[t], 4000, seed=derive_seed_int(22, t))
        q = np.quantile(sample, 0.1)
        hits[t] = y[t + 1] < q
    assert abs(hits.mean() - 0.1) < 2.0 * np.sqrt(0.1 * 0.9 / 500)


def derive_seed_int(base, t):
    from scorebayes.utils import derive_rng

    return int(derive_rng(base, "mc-q", t).integers(2**31))
