"""Positively-oriented scoring rules S(P, y) and the in-sample criterion
used by the generalized posterior update.

Single-point scores work on any distribution object from
:mod:`scorebayes.distributions`. :func:`make_criterion` builds the summed
criterion as a fast closure specialized per predictive class; the naive
per-step construction via predictive objects gives identical values and is
exercised as an oracle in the test suite.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np
from scipy.special import log_ndtr, ndtr, ndtri

from . import models as _models
from .distributions import Gaussian, StdSkewNormal
from .utils import DegenerateScaleError, InvalidInputError

__all__ = [
    "CensorRegion",
    "IntervalLevel",
    "LogScoreRule",
    "CrpsRule",
    "CensoredScoreRule",
    "MsisRule",
    "parse_rule",
    "log_score",
    "censored_score",
    "crps",
    "crps_gaussian",
    "crps_quadrature",
    "msis_update_score",
    "msis_competition",
    "threshold_from_empirical_quantile",
    "score_sum",
    "make_criterion",
]

_LOG_2PI = math.log(2.0 * math.pi)
_INV_SQRT_PI = 1.0 / math.sqrt(math.pi)


# ---------------------------------------------------------------------------
# rule and region types


@dataclass(frozen=True)
class CensorRegion:
    """Region of interest A: {y <= threshold} (below) or {y >= threshold} (above)."""

    threshold: float
    side: str

    def __post_init__(self):
        if self.side not in ("below", "above"):
            raise InvalidInputError("side must be 'below' or 'above'")
        if not np.isfinite(self.threshold):
            raise InvalidInputError("threshold must be finite")

    def contains(self, y):
        if self.side == "below":
            return y <= self.threshold
        return y >= self.threshold


@dataclass(frozen=True)
class IntervalLevel:
    """1 - coverage of the prediction interval plus the horizon cap."""

    alpha: float = 0.05
    horizon_cap: int = 6

    def __post_init__(self):
        if not (0.0 < self.alpha < 1.0):
            raise InvalidInputError("alpha must lie in (0, 1)")
        if self.horizon_cap < 1:
            raise InvalidInputError("horizon_cap must be >= 1")


@dataclass(frozen=True)
class LogScoreRule:
    id: str = field(default="ls", init=False)


@dataclass(frozen=True)
class CrpsRule:
    id: str = field(default="crps", init=False)


@dataclass(frozen=True)
class CensoredScoreRule:
    """Censored likelihood score with the region set per estimation window.

    ``side="below"`` with ``tail_prob=0.1`` rewards lower-tail accuracy below
    the empirical 10% quantile; ``side="above"`` with ``tail_prob=0.9``
    rewards the upper tail beyond the 90% quantile. A fixed ``threshold``
    overrides the per-window empirical quantile.
    """

    side: str
    tail_prob: float
    threshold: float | None = None

    def __post_init__(self):
        if self.side not in ("below", "above"):
            raise InvalidInputError("side must be 'below' or 'above'")
        if not (0.0 < self.tail_prob < 1.0):
            raise InvalidInputError("tail_prob must lie in (0, 1)")

    @property
    def id(self):
        mark = "<" if self.side == "below" else ">"
        return f"cs{mark}{round(self.tail_prob * 100):d}"

    def region_for(self, window) -> CensorRegion:
        if self.threshold is not None:
            return CensorRegion(self.threshold, self.side)
        thr = threshold_from_empirical_quantile(window, self.tail_prob)
        return CensorRegion(thr, self.side)


@dataclass(frozen=True)
class MsisRule:
    level: IntervalLevel = IntervalLevel()
    id: str = field(default="msis", init=False)


_CS_PATTERN = re.compile(r"^cs([<>])(\d+(?:\.\d+)?)$")


def parse_rule(identifier: str, *, msis_level: IntervalLevel | None = None):
    """Map a CLI identifier (ls, crps, cs<10, cs>90, msis) to a rule object."""
    ident = identifier.strip().lower()
    if ident == "ls":
        return LogScoreRule()
    if ident == "crps":
        return CrpsRule()
    if ident == "msis":
        return MsisRule(msis_level or IntervalLevel())
    m = _CS_PATTERN.match(ident)
    if m:
        side = "below" if m.group(1) == "<" else "above"
        return CensoredScoreRule(side, float(m.group(2)) / 100.0)
    raise InvalidInputError(f"unknown scoring rule identifier {identifier!r}")


# ---------------------------------------------------------------------------
# single-point scores


def log_score(pred, y) -> float:
    """ln density at the realization; -inf where the density vanishes."""
    with np.errstate(divide="ignore"):
        return float(pred.logpdf(y))


def censored_score(pred, y, region: CensorRegion) -> float:
    """ln density inside the region of interest, ln mass of the complement
    otherwise."""
    with np.errstate(divide="ignore"):
        if region.contains(y):
            return float(pred.logpdf(y))
        if region.side == "below":
            mass = 1.0 - float(pred.cdf(region.threshold))
        else:
            mass = float(pred.cdf(region.threshold))
        return math.log(mass) if mass > 0.0 else -np.inf


def crps_gaussian(mu, sigma, y):
    """Closed-form Gaussian CRPS, positively oriented."""
    z = (np.asarray(y, dtype=float) - mu) / sigma
    phi = np.exp(-0.5 * (z * z + _LOG_2PI))
    loss = sigma * (z * (2.0 * ndtr(z) - 1.0) + 2.0 * phi - _INV_SQRT_PI)
    return -loss


def crps_quadrature(pred, y, n_points: int = 2001, span: float = 10.0) -> float:
    """Trapezoid quadrature of the CRPS integral over mean +/- span*sd.

    The grid is split at the realization so the step discontinuity never
    spans a cell, and the usual endpoint-derivative correction is applied to
    each smooth piece; the derivative of the integrand only needs the
    predictive pdf/cdf at the three breakpoints.
    """
    m, s = pred.mean(), pred.sd()
    lo = min(m - span * s, y - s)
    hi = max(m + span * s, y + s)
    n_cells = n_points - 1
    n_left = int(round((y - lo) / (hi - lo) * n_cells))
    n_left = min(max(n_left, 1), n_cells - 1)
    xl = np.linspace(lo, y, n_left + 1)
    xr = np.linspace(y, hi, n_cells - n_left + 1)
    fl = np.asarray(pred.cdf(xl))
    fr = np.asarray(pred.cdf(xr))
    p_lo, p_y, p_hi = (float(pred.pdf(v)) for v in (lo, y, hi))
    hl = (y - lo) / n_left
    hr = (hi - y) / (n_cells - n_left)
    # piece integrands F^2 and (1-F)^2 have derivatives 2*F*p and -2*(1-F)*p
    left = np.trapezoid(fl**2, dx=hl) - hl * hl / 12.0 * (
        2.0 * fl[-1] * p_y - 2.0 * fl[0] * p_lo
    )
    right = np.trapezoid((1.0 - fr) ** 2, dx=hr) - hr * hr / 12.0 * (
        -2.0 * (1.0 - fr[-1]) * p_hi + 2.0 * (1.0 - fr[0]) * p_y
    )
    return -float(left + right)


def crps(pred, y) -> float:
    """Continuously ranked probability score (larger is better).

    Gaussian predictives use the closed form; everything else falls back to
    the 2001-point trapezoid quadrature.
    """
    if isinstance(pred, Gaussian):
        return float(crps_gaussian(pred.mu, pred.sigma, y))
    return crps_quadrature(pred, y)


def _interval_penalties(lower, upper, actuals, alpha):
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    actuals = np.asarray(actuals, dtype=float)
    return (
        (upper - lower)
        + (2.0 / alpha) * (lower - actuals) * (actuals < lower)
        + (2.0 / alpha) * (actuals - upper) * (actuals > upper)
    )


def msis_update_score(lower, upper, actuals, level: IntervalLevel) -> float:
    """Negative average interval score over the available horizons."""
    lower = np.asarray(lower, dtype=float)
    if lower.size == 0:
        raise InvalidInputError("empty horizon set")
    if not (len(lower) == len(np.atleast_1d(upper)) == len(np.atleast_1d(actuals))):
        raise InvalidInputError("lower/upper/actuals must align")
    pen = _interval_penalties(lower, upper, actuals, level.alpha)
    return -float(np.mean(pen))


def msis_competition(series, lower, upper, actuals, alpha: float, m: int = 1) -> float:
    """Scaled interval score of a full forecast path, negatively signed so
    that larger means better; the scale is the in-sample mean absolute
    m-step difference."""
    y = np.asarray(series, dtype=float)
    if y.size <= m:
        raise InvalidInputError("series must be longer than the seasonal lag m")
    scale = float(np.mean(np.abs(y[m:] - y[:-m])))
    if scale == 0.0:
        raise DegenerateScaleError("constant series: zero mean absolute difference")
    pen = _interval_penalties(lower, upper, actuals, alpha)
    return -float(np.mean(pen)) / scale


def threshold_from_empirical_quantile(series, p: float) -> float:
    """Type-7 interpolated sample quantile of the estimation window."""
    if not (0.0 < p < 1.0):
        raise InvalidInputError("p must lie in (0, 1)")
    y = np.asarray(series, dtype=float)
    if y.size < 10:
        raise InvalidInputError("need at least 10 observations")
    return float(np.quantile(y, p))


# ---------------------------------------------------------------------------
# summed criteria (the S_n entering the posterior update)


def _gaussian_path_terms(rule, mu, sig2, targets, region):
    """Vectorized per-step scores for Gaussian conditionals."""
    if isinstance(rule, LogScoreRule):
        r = targets - mu
        return -0.5 * (np.log(2.0 * np.pi * sig2) + r * r / sig2)
    if isinstance(rule, CrpsRule):
        return crps_gaussian(mu, np.sqrt(sig2), targets)
    if isinstance(rule, CensoredScoreRule):
        s = np.sqrt(sig2)
        r = targets - mu
        ls = -0.5 * (np.log(2.0 * np.pi * sig2) + (r / s) ** 2)
        zthr = (region.threshold - mu) / s
        if region.side == "below":
            inside = targets <= region.threshold
            out = log_ndtr(-zthr)
        else:
            inside = targets >= region.threshold
            out = log_ndtr(zthr)
        return np.where(inside, ls, out)
    raise InvalidInputError(f"rule {rule.id!r} has no Gaussian path")


def _skew_path_terms(rule, mu, sig, gamma, targets, region):
    """Vectorized per-step scores for loc-scale skew-normal conditionals."""
    base = StdSkewNormal(gamma)
    z = (targets - mu) / sig
    if isinstance(rule, LogScoreRule):
        return base.logpdf(z) - np.log(sig)
    if isinstance(rule, CensoredScoreRule):
        ls = base.logpdf(z) - np.log(sig)
        zthr = (region.threshold - mu) / sig
        cdf_thr = base.cdf(zthr)
        with np.errstate(divide="ignore"):
            if region.side == "below":
                inside = targets <= region.threshold
                out = np.log(1.0 - cdf_thr)
            else:
                inside = targets >= region.threshold
                out = np.log(cdf_thr)
        return np.where(inside, ls, out)
    raise InvalidInputError(f"rule {rule.id!r} has no skew-normal path")


def _volatility_criterion(model, y, rule):
    """Criterion closure for the Gaussian ARCH/GARCH classes."""
    targets = y[1:]
    region = rule.region_for(y) if isinstance(rule, CensoredScoreRule) else None

    def crit(theta):
        theta = np.asarray(theta, dtype=float)
        if not model.in_support(theta):
            return -np.inf
        sig2 = model.variance_path(theta, y)[:-1]
        terms = _gaussian_path_terms(rule, theta[0], sig2, targets, region)
        return float(np.sum(terms))

    return crit


def _pool_criterion(model, y, rule):
    """Criterion closure for the linear pool; only the weight varies, so the
    constituent score paths are precomputed once."""
    targets = y[1:]
    (mu1, s1_full, gamma), (mu2, s2_full) = model.component_paths(y)
    s1, s2 = s1_full[:-1], s2_full[:-1]
    region = rule.region_for(y) if isinstance(rule, CensoredScoreRule) else None

    if isinstance(rule, (LogScoreRule, CensoredScoreRule)):
        comp1 = _skew_path_terms(rule, mu1, s1, gamma, targets, region)
        comp2 = _gaussian_path_terms(rule, mu2, s2 * s2, targets, region)

        def crit(theta):
            w = float(np.asarray(theta).ravel()[0])
            if not model.in_support([w]):
                return -np.inf
            terms = np.logaddexp(math.log(w) + comp1, math.log1p(-w) + comp2)
            return float(np.sum(terms))

        return crit

    if isinstance(rule, CrpsRule):
        base = StdSkewNormal(gamma)
        sd_hi = np.maximum(s1, s2)
        center = 0.5 * (mu1 + mu2)
        lo = np.minimum(center - 10.0 * sd_hi - abs(mu1 - mu2), targets - sd_hi)
        hi = np.maximum(center + 10.0 * sd_hi + abs(mu1 - mu2), targets + sd_hi)
        n_pts = 2001
        grids = lo[:, None] + np.linspace(0.0, 1.0, n_pts) * (hi - lo)[:, None]
        # snap the nearest grid point onto each realization so the step
        # discontinuity never spans a trapezoid cell
        k = np.clip(
            np.rint((targets - lo) / (hi - lo) * (n_pts - 1)).astype(int), 1, n_pts - 2
        )
        rows = np.arange(targets.size)
        grids[rows, k] = targets
        dxs = np.diff(grids, axis=1)
        below_cell = np.arange(n_pts - 1)[None, :] < k[:, None]
        f1 = base.cdf((grids - mu1) / s1[:, None])
        f2 = ndtr((grids - mu2) / s2[:, None])

        def crit(theta):
            w = float(np.asarray(theta).ravel()[0])
            if not model.in_support([w]):
                return -np.inf
            f = w * f1 + (1.0 - w) * f2
            gb = f * f
            ga = (1.0 - f) ** 2
            cell_b = 0.5 * dxs * (gb[:, :-1] + gb[:, 1:])
            cell_a = 0.5 * dxs * (ga[:, :-1] + ga[:, 1:])
            integrals = np.where(below_cell, cell_b, cell_a).sum(axis=1)
            return -float(np.sum(integrals))

        return crit

    raise InvalidInputError(f"rule {rule.id!r} is not supported for the pool class")


def _ets_msis_criterion(model, y, rule):
    """Multi-horizon interval criterion for the ETS class."""
    level = rule.level
    n = y.size
    cap = level.horizon_cap
    z = ndtri(1.0 - level.alpha / 2.0)
    tgt_idx = np.arange(n)[:, None] + np.arange(1, cap + 1)[None, :] - 1
    valid = tgt_idx < n
    counts = valid.sum(axis=1)
    y_safe = np.concatenate([y, [0.0]])
    targets = y_safe[np.minimum(tgt_idx, n)]
    spec = model.spec

    def crit(theta):
        theta = np.asarray(theta, dtype=float)
        if not model.in_support(theta):
            return -np.inf
        theta1, theta2, theta4 = model.expand(theta)
        levels, trends, _ = _models.ets_filter(
            spec.trend, theta1, theta2, theta4, spec.l0, spec.b0, y, return_states=True
        )
        c = _models.ets_trend_weights(spec.trend, theta4, cap)
        sd = np.sqrt(
            spec.sigma2
            * _models.ets_variance_factors(spec.trend, theta1, theta2, theta4, cap)
        )
        mu = levels[:n, None] + c[None, :] * trends[:n, None]
        half = z * sd[None, :]
        lower, upper = mu - half, mu + half
        pen = (
            (upper - lower)
            + (2.0 / level.alpha) * (lower - targets) * ((targets < lower) & valid)
            + (2.0 / level.alpha) * (targets - upper) * ((targets > upper) & valid)
        )
        pen = np.where(valid, pen, 0.0)
        return -float(np.sum(pen.sum(axis=1) / counts))

    return crit


def _naive_criterion(model, y, rule):
    """Per-step construction through predictive objects (slow, general)."""
    start = 0 if isinstance(model, _models.EtsClass) else 1
    region = rule.region_for(y) if isinstance(rule, CensoredScoreRule) else None

    def one_step_score(pred, target):
        if isinstance(rule, LogScoreRule):
            return log_score(pred, target)
        if isinstance(rule, CensoredScoreRule):
            return censored_score(pred, target, region)
        if isinstance(rule, CrpsRule):
            return crps(pred, target)
        raise InvalidInputError(f"rule {rule.id!r} not supported here")

    def crit(theta):
        theta = np.asarray(theta, dtype=float)
        if not model.in_support(theta):
            return -np.inf
        total = 0.0
        for t in range(start, y.size):
            pred = model.predictive(theta, y[:t])
            total += one_step_score(pred, y[t])
        return total

    return crit


def make_criterion(model, series, rule):
    """Build theta -> S_n(theta) for a predictive class and scoring rule.

    The sum runs over sequential one-step predictives conditioning on
    y_1..y_t; the ARCH/GARCH/pool classes start at the first conditionable
    point while ETS starts from its initial states. Off-support parameters
    score -inf.
    """
    y = np.asarray(series, dtype=float)
    if y.size < 2:
        raise InvalidInputError("need at least 2 observations")
    if isinstance(rule, MsisRule):
        if not isinstance(model, _models.EtsClass):
            raise InvalidInputError("the MSIS criterion requires the ETS class")
        return _ets_msis_criterion(model, y, rule)
    if isinstance(model, (_models.Arch1Class, _models.Garch11Class)):
        return _volatility_criterion(model, y, rule)
    if isinstance(model, _models.LinearPoolClass):
        return _pool_criterion(model, y, rule)
    return _naive_criterion(model, y, rule)


def score_sum(model, theta, series, rule) -> float:
    """S_n: the summed one-step (or multi-horizon) score at ``theta``."""
    return make_criterion(model, series, rule)(theta)
