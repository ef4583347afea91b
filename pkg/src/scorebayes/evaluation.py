"""Forecast evaluation downstream of the posterior draws: mean predictives
and their functionals, VaR exceedance with the coverage/independence
likelihood-ratio test, consistent scoring of expected-shortfall forecasts,
Murphy diagrams and moving-block bootstrap confidence bands.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import Gaussian, GaussianMixture
from .models import gaussian_es
from .utils import InvalidInputError, NumericalError, derive_rng

__all__ = [
    "mean_predictive",
    "mean_predictive_quantile",
    "mean_predictive_es",
    "dist_es",
    "ExceedanceRecord",
    "var_exceedance",
    "ChristoffersenResult",
    "christoffersen_test",
    "es_consistent_score",
    "MurphyGrid",
    "murphy_diagram",
    "block_bootstrap_ci",
    "es_posterior_distribution",
    "kde_density",
]

CHI2_2_CRIT_1PCT = 9.21034037197618  # chi-square(2) critical value at 1%


# ---------------------------------------------------------------------------
# mean predictive functionals


def mean_predictive(model, draws, history):
    """Equally-weighted average of the per-draw one-step predictives."""
    thetas = draws.draws if hasattr(draws, "draws") else np.asarray(draws, dtype=float)
    if thetas.size == 0:
        raise InvalidInputError("need at least one retained draw")
    return model.mean_predictive(thetas, history)


def mean_predictive_quantile(mp, p: float) -> float:
    """Quantile of an averaged CDF by bracketed bisection to 1e-8."""
    if not (0.0 < p < 1.0):
        raise InvalidInputError("p must lie in (0, 1)")
    try:
        return float(mp.ppf(p, tol=1e-8))
    except TypeError:
        return float(mp.ppf(p))


def mean_predictive_es(mp, alpha: float, tail: str, mc_draws: int = 100_000, seed=0) -> float:
    """Monte Carlo expected shortfall of a mean predictive.

    ``alpha`` is the quantile level (0.1 for the lower tail of a long
    position, 0.9 for the upper tail of a short one); the signed convention
    matches :func:`scorebayes.models.gaussian_es`.
    """
    if mc_draws < 10_000:
        raise InvalidInputError("mc_draws must be at least 1e4")
    rng = seed if isinstance(seed, np.random.Generator) else derive_rng(seed, "es-mc")
    sample = mp.rvs(mc_draws, rng)
    return sample_es(sample, alpha, tail)


def sample_es(sample, alpha: float, tail: str) -> float:
    """Tail conditional mean of a sample, with the long/short sign convention."""
    if not (0.0 < alpha < 1.0):
        raise InvalidInputError("alpha must lie in (0, 1)")
    sample = np.asarray(sample, dtype=float)
    q = np.quantile(sample, alpha)
    if tail == "lower":
        sel = sample[sample <= q]
        if sel.size == 0:
            raise NumericalError("empty lower-tail sample")
        return -float(np.mean(sel))
    if tail == "upper":
        sel = sample[sample >= q]
        if sel.size == 0:
            raise NumericalError("empty upper-tail sample")
        return float(np.mean(sel))
    raise InvalidInputError(f"tail must be 'lower' or 'upper', got {tail!r}")


def dist_es(dist, alpha: float, tail: str, n_grid: int = 4001) -> float:
    """Expected shortfall of an arbitrary distribution object.

    Gaussians use the closed form; anything else integrates y*pdf(y) over
    the tail delimited by the alpha-quantile.
    """
    if isinstance(dist, Gaussian):
        return gaussian_es(dist.mu, dist.sigma, alpha, tail)
    q = float(dist.ppf(alpha))
    m, s = dist.mean(), dist.sd()
    if tail == "lower":
        grid = np.linspace(min(m - 12.0 * s, q - s), q, n_grid)
        mass = alpha
    elif tail == "upper":
        grid = np.linspace(q, max(m + 12.0 * s, q + s), n_grid)
        mass = 1.0 - alpha
    else:
        raise InvalidInputError(f"tail must be 'lower' or 'upper', got {tail!r}")
    integral = float(np.trapezoid(grid * np.asarray(dist.pdf(grid)), grid))
    cond_mean = integral / mass
    return -cond_mean if tail == "lower" else cond_mean


def es_posterior_distribution(model, draws, history, alpha: float, tail: str):
    """One expected-shortfall value per retained draw.

    Classes with Gaussian one-step predictives use the closed form draw by
    draw; other classes integrate numerically.
    """
    thetas = draws.draws if hasattr(draws, "draws") else np.asarray(draws, dtype=float)
    mp = model.mean_predictive(thetas, history)
    if isinstance(mp, GaussianMixture):
        return np.array(
            [gaussian_es(m, s, alpha, tail) for m, s in zip(mp.mus, mp.sigmas)]
        )
    thetas = np.atleast_2d(thetas)
    return np.array(
        [dist_es(model.predictive(th, history), alpha, tail) for th in thetas]
    )


# ---------------------------------------------------------------------------
# VaR exceedances


@dataclass(frozen=True)
class ExceedanceRecord:
    """0/1 hit sequence with its nominal hit probability and tail side."""

    hits: np.ndarray
    alpha: float
    tail: str = "lower"

    def __post_init__(self):
        hits = np.asarray(self.hits, dtype=int)
        if hits.size and not np.isin(hits, (0, 1)).all():
            raise InvalidInputError("hits must be 0/1")
        object.__setattr__(self, "hits", hits)


def var_exceedance(record: ExceedanceRecord) -> float:
    """Proportion of hits."""
    if record.hits.size == 0:
        raise InvalidInputError("empty exceedance record")
    return float(np.mean(record.hits))


@dataclass(frozen=True)
class ChristoffersenResult:
    lr_uc: float
    lr_ind: float
    lr_cc: float
    reject_at_1pct: bool


def _bern_loglik(n1, n0, p):
    # 0*ln(0) convention
    out = 0.0
    if n1 > 0:
        out += n1 * math.log(p) if p > 0 else -math.inf
    if n0 > 0:
        out += n0 * math.log(1.0 - p) if p < 1 else -math.inf
    return out


def christoffersen_test(record: ExceedanceRecord) -> ChristoffersenResult:
    """Joint likelihood-ratio test of correct unconditional coverage and
    first-order independence of VaR violations."""
    hits = record.hits
    if hits.size < 20:
        raise InvalidInputError("need at least 20 observations")
    n = hits.size
    n1 = int(hits.sum())
    n0 = n - n1
    p_hat = n1 / n
    lr_uc = 2.0 * (_bern_loglik(n1, n0, p_hat) - _bern_loglik(n1, n0, record.alpha))

    prev, curr = hits[:-1], hits[1:]
    n00 = int(np.sum((prev == 0) & (curr == 0)))
    n01 = int(np.sum((prev == 0) & (curr == 1)))
    n10 = int(np.sum((prev == 1) & (curr == 0)))
    n11 = int(np.sum((prev == 1) & (curr == 1)))
    pi01 = n01 / (n00 + n01) if (n00 + n01) else 0.0
    pi11 = n11 / (n10 + n11) if (n10 + n11) else 0.0
    pi_pool = (n01 + n11) / (n - 1)
    ll_markov = _bern_loglik(n01, n00, pi01) + _bern_loglik(n11, n10, pi11)
    ll_iid = _bern_loglik(n01 + n11, n00 + n10, pi_pool)
    lr_ind = 2.0 * (ll_markov - ll_iid)

    lr_cc = lr_uc + lr_ind
    return ChristoffersenResult(lr_uc, lr_ind, lr_cc, bool(lr_cc > CHI2_2_CRIT_1PCT))


# ---------------------------------------------------------------------------
# consistent scoring of (VaR, ES) and Murphy diagrams


def es_consistent_score(var_forecast, es_forecast, y, alpha: float, eta):
    """Positively-oriented scoring function for the joint (VaR, ES)
    functional, indexed by eta; evaluated exactly as written.

    The VaR input is the raw alpha-quantile; the ES input follows the signed
    convention of :func:`scorebayes.models.gaussian_es` (positive magnitudes
    for a typical lower tail). Both methods under comparison must be quoted
    in the same convention. For an upper-tail assessment feed the negated
    actuals and VaR series.
    """
    if not (0.0 < alpha < 1.0):
        raise InvalidInputError("alpha must lie in (0, 1)")
    var_f = np.asarray(var_forecast, dtype=float)
    es_f = np.asarray(es_forecast, dtype=float)
    y = np.asarray(y, dtype=float)
    eta = np.asarray(eta, dtype=float)
    hit = np.asarray(y <= var_f, dtype=float)
    inner = (1.0 / alpha) * hit * (var_f - y) - (var_f - eta)
    ind_es = np.asarray(eta <= es_f, dtype=float)
    ind_y = np.asarray(eta <= y, dtype=float)
    out = -ind_es * inner - ind_y * (y - eta)
    if out.ndim == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class MurphyGrid:
    etas: np.ndarray
    deltas: np.ndarray
    ci_lower: np.ndarray
    ci_upper: np.ndarray


def murphy_diagram(
    var_a,
    es_a,
    var_b,
    es_b,
    actuals,
    alpha: float,
    eta_grid,
    block_len: int = 10,
    reps: int = 1000,
    level: float = 0.95,
    seed=0,
) -> MurphyGrid:
    """Average consistent-score differences (method A minus method B) across
    the eta grid, with moving-block bootstrap confidence bands."""
    var_a, es_a = np.asarray(var_a, float), np.asarray(es_a, float)
    var_b, es_b = np.asarray(var_b, float), np.asarray(es_b, float)
    actuals = np.asarray(actuals, float)
    lens = {var_a.size, es_a.size, var_b.size, es_b.size, actuals.size}
    if len(lens) != 1 or actuals.size == 0:
        raise InvalidInputError(f"misaligned forecast/actual lengths: {sorted(lens)}")
    etas = np.asarray(eta_grid, dtype=float)
    if etas.size == 0 or np.any(np.diff(etas) < 0):
        raise InvalidInputError("eta grid must be nonempty and ascending")

    eta_col = etas[:, None]
    fa = es_consistent_score(var_a[None, :], es_a[None, :], actuals[None, :], alpha, eta_col)
    fb = es_consistent_score(var_b[None, :], es_b[None, :], actuals[None, :], alpha, eta_col)
    diff = fa - fb  # (K, T)
    deltas = diff.mean(axis=1)

    T = actuals.size
    idx = _block_bootstrap_indices(T, block_len, reps, seed)
    rep_means = diff[:, idx].mean(axis=2)  # (K, reps)
    tail = (1.0 - level) / 2.0
    lo = np.quantile(rep_means, tail, axis=1)
    hi = np.quantile(rep_means, 1.0 - tail, axis=1)
    return MurphyGrid(etas, deltas, np.minimum(lo, deltas), np.maximum(hi, deltas))


def _block_bootstrap_indices(T: int, block_len: int, reps: int, seed) -> np.ndarray:
    if not (1 <= block_len <= T):
        raise InvalidInputError("block length must lie in [1, series length]")
    rng = seed if isinstance(seed, np.random.Generator) else derive_rng(seed, "block-bootstrap")
    n_blocks = -(-T // block_len)  # ceil
    starts = rng.integers(0, T - block_len + 1, size=(reps, n_blocks))
    idx = (starts[:, :, None] + np.arange(block_len)[None, None, :]).reshape(reps, -1)
    return idx[:, :T]


def block_bootstrap_ci(diff_series, block_len: int, reps: int = 1000, level: float = 0.95, seed=0):
    """Moving-block bootstrap percentile interval for the series mean."""
    x = np.asarray(diff_series, dtype=float)
    idx = _block_bootstrap_indices(x.size, block_len, reps, seed)
    means = x[idx].mean(axis=1)
    tail = (1.0 - level) / 2.0
    return float(np.quantile(means, tail)), float(np.quantile(means, 1.0 - tail))


# ---------------------------------------------------------------------------
# density summaries


def kde_density(values, grid=None, n_grid: int = 512):
    """Gaussian kernel density with the Silverman bandwidth; returns (grid, density)."""
    x = np.asarray(values, dtype=float)
    if x.size < 2:
        raise InvalidInputError("need at least 2 values for a density estimate")
    sd = float(np.std(x, ddof=1))
    iqr = float(np.subtract(*np.quantile(x, [0.75, 0.25])))
    spread = min(sd, iqr / 1.34) if iqr > 0 else sd
    if spread <= 0:
        spread = max(abs(x[0]), 1.0) * 1e-3
    bw = 0.9 * spread * x.size ** (-0.2)
    if grid is None:
        grid = np.linspace(x.min() - 3 * bw, x.max() + 3 * bw, n_grid)
    z = (np.asarray(grid)[:, None] - x[None, :]) / bw
    dens = np.exp(-0.5 * z * z).sum(axis=1) / (x.size * bw * math.sqrt(2 * math.pi))
    return np.asarray(grid), dens
