"""Score-weighted generalized posteriors: adaptive random-walk MH samplers
per predictive class, the grid posterior for the pool weight, scale-factor
calibration, and the score-optimizing point estimator.

The unnormalized log kernel is ``w * S_n(theta) + log prior(theta)``;
off-support points carry a -inf sentinel. Proposals are truncated normals
on the per-parameter support box, with the truncation-mass correction in
the acceptance ratio, and step sizes adapt during burn-in only (targeting
acceptance between 30% and 70%), so the stationary target is preserved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp, ndtr, ndtri

from . import models as _models
from . import scoring as _scoring
from .utils import CalibrationError, InvalidInputError, SamplerError

__all__ = [
    "ScaleFactor",
    "ChainSettings",
    "PosteriorDraws",
    "log_posterior_kernel",
    "sample_arch",
    "sample_garch",
    "sample_ets",
    "grid_posterior_mixture",
    "sample_posterior",
    "calibrate_w_crps",
    "calibrate_w_msis",
    "msis_scale_factor",
    "optimize_score",
]


@dataclass(frozen=True)
class ScaleFactor:
    """Positive weight on the score criterion inside the posterior update."""

    w: float
    method: str = "manual"

    def __post_init__(self):
        if not (np.isfinite(self.w) and self.w > 0.0):
            raise InvalidInputError(f"scale factor must be positive and finite, got {self.w}")
        if self.method not in ("unit", "crps_ratio", "msis_formula", "manual"):
            raise InvalidInputError(f"unknown scale method {self.method!r}")


UNIT_W = ScaleFactor(1.0, "unit")


@dataclass
class ChainSettings:
    burn_in: int = 10_000
    iters: int = 40_000
    thin: int = 10
    step_init: float = 0.05
    adapt_every: int = 50
    accept_low: float = 0.3
    accept_high: float = 0.7
    step_up: float = 1.1
    step_down: float = 0.9

    @property
    def retained(self) -> int:
        return self.iters // self.thin


@dataclass
class PosteriorDraws:
    """Retained draws plus the scale factor and chain diagnostics."""

    draws: np.ndarray  # (M, d)
    param_names: tuple
    w: ScaleFactor
    acceptance_rate: float
    chain_length: int
    burn_in: int
    thin: int
    seed: object
    diagnostics: dict = field(default_factory=dict)

    @property
    def m(self) -> int:
        return self.draws.shape[0]

    def mean(self):
        return self.draws.mean(axis=0)

    def sd(self):
        return self.draws.std(axis=0, ddof=1)

    def to_csv(self, path):
        header = ",".join(self.param_names)
        np.savetxt(path, self.draws, delimiter=",", header=header, comments="", fmt="%.17g")


def _w_value(w) -> float:
    return w.w if isinstance(w, ScaleFactor) else float(w)


def log_posterior_kernel(model, theta, series, rule, w) -> float:
    """Unnormalized log posterior w*S_n(theta) + ln prior(theta)."""
    theta = np.asarray(theta, dtype=float)
    lp = model.log_prior(theta)
    if not np.isfinite(lp):
        return -np.inf
    crit = _scoring.score_sum(model, theta, series, rule)
    return _w_value(w) * crit + lp


def _propose_truncnorm(cur, steps, idx, lows, highs, rng):
    """Truncated-normal proposal for the coordinates in ``idx``.

    Returns the proposed values and the log proposal-density correction
    log q(cur|prop) - log q(prop|cur) from the truncation masses.
    """
    s = steps[idx]
    a = ndtr((lows[idx] - cur[idx]) / s)
    b = ndtr((highs[idx] - cur[idx]) / s)
    u = np.clip(a + rng.random(len(idx)) * (b - a), 1e-15, 1.0 - 1e-15)
    vals = cur[idx] + s * ndtri(u)
    z_cur = b - a
    z_prop = ndtr((highs[idx] - vals) / s) - ndtr((lows[idx] - vals) / s)
    with np.errstate(divide="ignore"):
        logq = float(np.sum(np.log(z_cur) - np.log(z_prop)))
    return vals, logq


def _blocks(scheme, dim, rng):
    if scheme == "joint":
        return [np.arange(dim)]
    if scheme == "pairs":
        perm = rng.permutation(dim)
        return [perm[: dim // 2], perm[dim // 2 :]]
    if scheme == "scan":
        return [np.array([k]) for k in rng.permutation(dim)]
    raise InvalidInputError(f"unknown MH scheme {scheme!r}")


def _mh_chain(model, series, rule, w, settings, seed, init, scheme) -> PosteriorDraws:
    y = np.asarray(series, dtype=float)
    settings = settings or ChainSettings()
    rng = np.random.default_rng(seed)
    wval = _w_value(w)
    crit = _scoring.make_criterion(model, y, rule)

    def kernel(theta):
        lp = model.log_prior(theta)
        if not np.isfinite(lp):
            return -np.inf
        return wval * crit(theta) + lp

    dim = model.dim
    lows = np.array([b[0] for b in model.box], dtype=float)
    highs = np.array([b[1] for b in model.box], dtype=float)
    cur = np.asarray(init if init is not None else model.start(y), dtype=float).copy()
    if not model.in_support(cur):
        raise InvalidInputError(f"chain initialization {cur!r} is off support")
    cur_lp = kernel(cur)
    if not np.isfinite(cur_lp):
        raise SamplerError("kernel is -inf at the chain initialization")

    steps = np.full(dim, settings.step_init)
    win_prop = np.zeros(dim)
    win_acc = np.zeros(dim)
    post_prop = 0
    post_acc = 0
    total_acc = 0
    m = settings.retained
    draws = np.empty((m, dim))
    kept = 0

    total_iters = settings.burn_in + settings.iters
    for it in range(total_iters):
        in_burn = it < settings.burn_in
        for idx in _blocks(scheme, dim, rng):
            vals, logq = _propose_truncnorm(cur, steps, idx, lows, highs, rng)
            prop = cur.copy()
            prop[idx] = vals
            prop_lp = kernel(prop)
            accept = np.log(rng.random()) < (prop_lp - cur_lp + logq)
            if accept:
                cur, cur_lp = prop, prop_lp
                total_acc += 1
            win_prop[idx] += 1
            win_acc[idx] += accept
            if not in_burn:
                post_prop += 1
                post_acc += accept
        if in_burn and settings.adapt_every and (it + 1) % settings.adapt_every == 0:
            rate = np.divide(win_acc, win_prop, out=np.zeros(dim), where=win_prop > 0)
            steps = np.where(rate > settings.accept_high, steps * settings.step_up, steps)
            steps = np.where(rate < settings.accept_low, steps * settings.step_down, steps)
            win_prop[:] = 0.0
            win_acc[:] = 0.0
        if not in_burn and (it - settings.burn_in + 1) % settings.thin == 0 and kept < m:
            draws[kept] = cur
            kept += 1

    if total_acc == 0:
        raise SamplerError(
            "zero accepted moves over the full chain",
            diagnostics={"steps": steps, "last_kernel": cur_lp, "init": init},
        )
    return PosteriorDraws(
        draws=draws[:kept],
        param_names=model.param_names,
        w=w if isinstance(w, ScaleFactor) else ScaleFactor(wval, "manual"),
        acceptance_rate=(post_acc / post_prop) if post_prop else 0.0,
        chain_length=total_iters,
        burn_in=settings.burn_in,
        thin=settings.thin,
        seed=seed,
        diagnostics={"steps": steps, "scheme": scheme, "final_kernel": cur_lp},
    )


def sample_arch(series, rule, w=UNIT_W, settings=None, seed=0, init=None) -> PosteriorDraws:
    """Joint random-walk MH over (theta1, theta2, theta3)."""
    if np.asarray(series).size < 30:
        raise InvalidInputError("need at least 30 observations to sample")
    return _mh_chain(_models.Arch1Class(), series, rule, w, settings, seed, init, "joint")


def sample_garch(series, rule, w=UNIT_W, settings=None, seed=0, init=None) -> PosteriorDraws:
    """Paired MH: the four parameters are randomly split into two pairs each
    iteration, each pair updated conditional on the other, with per-parameter
    adaptive step sizes."""
    if np.asarray(series).size < 30:
        raise InvalidInputError("need at least 30 observations to sample")
    return _mh_chain(_models.Garch11Class(), series, rule, w, settings, seed, init, "pairs")


def sample_ets(series, spec, rule, w, settings=None, seed=0, init=None) -> PosteriorDraws:
    """Random-scan MH over the active ETS smoothing/damping parameters."""
    model = _models.EtsClass(spec)
    return _mh_chain(model, series, rule, w, settings, seed, init, "scan")


def grid_posterior_mixture(
    series, pool, rule, w=UNIT_W, grid_size=1000, n_draws=4000, seed=0
) -> PosteriorDraws:
    """Posterior over the pool weight on the grid (i-0.5)/grid_size."""
    if grid_size < 2:
        raise InvalidInputError("grid_size must be >= 2")
    y = np.asarray(series, dtype=float)
    rng = np.random.default_rng(seed)
    wval = _w_value(w)
    crit = _scoring.make_criterion(pool, y, rule)
    cells = (np.arange(grid_size) + 0.5) / grid_size
    logk = np.array([wval * crit([c]) + pool.log_prior([c]) for c in cells])
    if not np.any(np.isfinite(logk)):
        raise SamplerError("all grid kernel values are -inf")
    probs = np.exp(logk - logsumexp(logk))
    probs /= probs.sum()
    idx = rng.choice(grid_size, size=n_draws, p=probs)
    return PosteriorDraws(
        draws=cells[idx].reshape(-1, 1),
        param_names=pool.param_names,
        w=w if isinstance(w, ScaleFactor) else ScaleFactor(wval, "manual"),
        acceptance_rate=1.0,
        chain_length=grid_size,
        burn_in=0,
        thin=1,
        seed=seed,
        diagnostics={"grid": cells, "probs": probs},
    )


_SCHEMES = {
    _models.Arch1Class: "joint",
    _models.SkewArch1Class: "joint",
    _models.Garch11Class: "pairs",
    _models.EtsClass: "scan",
}


def sample_posterior(
    model, series, rule, w=UNIT_W, settings=None, seed=0, init=None, grid_size=1000
) -> PosteriorDraws:
    """Sampler dispatch by predictive class."""
    if isinstance(model, _models.LinearPoolClass):
        settings = settings or ChainSettings()
        return grid_posterior_mixture(
            series, model, rule, w, grid_size=grid_size, n_draws=settings.retained, seed=seed
        )
    scheme = _SCHEMES[type(model)]
    return _mh_chain(model, series, rule, w, settings, seed, init, scheme)


def calibrate_w_crps(model, series, settings=None, seed=0, ls_draws=None) -> ScaleFactor:
    """CRPS scale factor: ratio of posterior-averaged LS and CRPS criteria.

    The expectation runs over draws from the exact-Bayes (log-score, w=1)
    posterior; pass ``ls_draws`` to reuse an existing chain.
    """
    y = np.asarray(series, dtype=float)
    if ls_draws is None:
        ls_draws = sample_posterior(model, y, _scoring.LogScoreRule(), UNIT_W, settings, seed)
    ls_crit = _scoring.make_criterion(model, y, _scoring.LogScoreRule())
    crps_crit = _scoring.make_criterion(model, y, _scoring.CrpsRule())
    num = sum(ls_crit(th) for th in ls_draws.draws)
    den = sum(crps_crit(th) for th in ls_draws.draws)
    if den == 0.0:
        raise CalibrationError("zero CRPS criterion sum in the scale-factor ratio")
    w = num / den
    if not (np.isfinite(w) and w > 0.0):
        raise CalibrationError(f"calibrated CRPS scale factor is unusable: {w}")
    return ScaleFactor(w, "crps_ratio")


def msis_scale_factor(n_obs: int, dim: int, criterion_value: float) -> float:
    """w = -n d / (2 S) so that w * S equals -n d / 2 at the anchor point."""
    if criterion_value == 0.0:
        raise CalibrationError("criterion value is exactly zero; scale undefined")
    return -n_obs * dim / (2.0 * criterion_value)


def calibrate_w_msis(series, spec, level=None) -> ScaleFactor:
    """MSIS scale factor w = -n d / (2 S_n(theta_hat)) at the fitted spec."""
    y = np.asarray(series, dtype=float)
    level = level or _scoring.IntervalLevel()
    model = _models.EtsClass(spec)
    crit = _scoring.make_criterion(model, y, _scoring.MsisRule(level))
    w = msis_scale_factor(y.size, model.dim, crit(model.start()))
    if not (np.isfinite(w) and w > 0.0):
        raise CalibrationError(f"MSIS scale factor is unusable: {w}")
    return ScaleFactor(w, "msis_formula")


def optimize_score(model, series, rule, restarts=3):
    """Score-optimizing point estimate over the constrained parameter space.

    Uses the same simplex machinery as the MLE fitter; with the log-score
    rule this coincides with maximum likelihood.
    """
    y = np.asarray(series, dtype=float)
    if y.size < 30 and not isinstance(model, _models.EtsClass):
        raise InvalidInputError("need at least 30 observations")
    crit = _scoring.make_criterion(model, y, rule)

    def neg(u):
        val = crit(model.from_unconstrained(u))
        return -val if np.isfinite(val) else 1e300

    u0 = model.to_unconstrained(model.start(y))
    u, _, _, _ = _models._simplex_minimize(neg, u0, restarts=restarts)
    return model.from_unconstrained(u)
