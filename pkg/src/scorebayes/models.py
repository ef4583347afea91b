"""Parametric one-step predictive classes: Gaussian ARCH(1), Gaussian
GARCH(1,1), a two-component linear pool (skew-normal ARCH + Gaussian GARCH),
and additive-error exponential smoothing (ETS) for multi-horizon intervals.

Each class maps a parameter vector plus conditioning data to a distribution
object from :mod:`scorebayes.distributions`. The ``*Class`` objects at the
bottom bundle the support, prior, reparameterization and predictive
construction needed by the posterior samplers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import minimize
from scipy.signal import lfilter
from scipy.special import expit, ndtri

from .distributions import Gaussian, GaussianMixture, LocScale, Mixture, StdSkewNormal
from .utils import ConvergenceError, InvalidInputError

__all__ = [
    "ArchParams",
    "GarchParams",
    "SkewArchParams",
    "MixtureWeight",
    "EtsSpec",
    "FitResult",
    "arch1_predictive",
    "skew_arch1_predictive",
    "garch11_filter",
    "garch11_predictive",
    "mixture_predictive",
    "gaussian_es",
    "fit_mle",
    "ets_select_and_fit",
    "ets_predictive",
    "ets_filter",
    "ets_trend_weights",
    "ets_variance_factors",
    "Arch1Class",
    "Garch11Class",
    "SkewArch1Class",
    "LinearPoolClass",
    "EtsClass",
    "model_class",
]

_LOG_2PI = math.log(2.0 * math.pi)


# ---------------------------------------------------------------------------
# parameter records


@dataclass(frozen=True)
class ArchParams:
    theta1: float  # mean
    theta2: float  # variance intercept
    theta3: float  # ARCH coefficient

    def __post_init__(self):
        if not (self.theta2 > 0.0):
            raise InvalidInputError("theta2 must be positive")
        if not (0.0 <= self.theta3 < 1.0):
            raise InvalidInputError("theta3 must lie in [0, 1)")

    def as_array(self):
        return np.array([self.theta1, self.theta2, self.theta3])


@dataclass(frozen=True)
class GarchParams:
    theta1: float
    theta2: float
    theta3: float
    theta4: float

    def __post_init__(self):
        if not (self.theta2 > 0.0):
            raise InvalidInputError("theta2 must be positive")
        if not (0.0 <= self.theta3 < 1.0 and 0.0 <= self.theta4 < 1.0):
            raise InvalidInputError("theta3 and theta4 must lie in [0, 1)")
        if not (self.theta3 + self.theta4 < 1.0):
            raise InvalidInputError("theta3 + theta4 must be below 1")

    def as_array(self):
        return np.array([self.theta1, self.theta2, self.theta3, self.theta4])


@dataclass(frozen=True)
class SkewArchParams:
    """ARCH(1) with standardized skew-normal innovations."""

    theta1: float
    theta2: float
    theta3: float
    gamma: float

    def __post_init__(self):
        if not (self.theta2 > 0.0):
            raise InvalidInputError("theta2 must be positive")
        if not (0.0 <= self.theta3 < 1.0):
            raise InvalidInputError("theta3 must lie in [0, 1)")
        if not np.isfinite(self.gamma):
            raise InvalidInputError("gamma must be finite")

    def as_array(self):
        return np.array([self.theta1, self.theta2, self.theta3, self.gamma])


@dataclass(frozen=True)
class MixtureWeight:
    """Scalar pool weight with frozen constituent parameter records."""

    theta1: float
    psi1: SkewArchParams
    psi2: GarchParams

    def __post_init__(self):
        if not (0.0 < self.theta1 < 1.0):
            raise InvalidInputError("theta1 must be strictly inside (0, 1)")


@dataclass(frozen=True)
class EtsSpec:
    """Additive-error exponential smoothing specification.

    ``trend`` is one of ``"none"``, ``"additive"``, ``"damped"``. ``theta1``
    and ``theta2`` are the level/trend smoothing parameters, ``theta4`` the
    damping parameter (only active for the damped trend). ``l0``/``b0`` are
    the initial states; ``level_end``/``trend_end`` hold the filtered states
    at the end of the fitted sample so the spec is a self-contained forecast
    origin.
    """

    trend: str
    theta1: float
    theta2: float = 0.0
    theta4: float = 1.0
    l0: float = 0.0
    b0: float = 0.0
    sigma2: float = 1.0
    level_end: float | None = None
    trend_end: float | None = None
    aic: float | None = None

    def __post_init__(self):
        if self.trend not in ("none", "additive", "damped"):
            raise InvalidInputError(f"unknown trend type {self.trend!r}")
        if not (0.0 < self.theta1 < 1.0):
            raise InvalidInputError("theta1 must lie in (0, 1)")
        if self.trend in ("additive", "damped") and not (0.0 < self.theta2 < 1.0):
            raise InvalidInputError("theta2 must lie in (0, 1)")
        if self.trend == "damped" and not (0.8 < self.theta4 < 0.98):
            raise InvalidInputError("theta4 must lie in (0.8, 0.98)")
        if not (self.sigma2 > 0.0):
            raise InvalidInputError("sigma2 must be positive")


@dataclass(frozen=True)
class FitResult:
    params: object
    loglik: float
    converged: bool
    iterations: int
    boundary: bool = False  # optimizer ran off to the edge of the support


# ---------------------------------------------------------------------------
# ARCH / GARCH predictives


def _as_theta(params, n):
    if hasattr(params, "as_array"):
        th = params.as_array()
    else:
        th = np.asarray(params, dtype=float)
    if th.size != n:
        raise InvalidInputError(f"expected {n} parameters, got {th.size}")
    return th


def arch1_predictive(params, y_prev: float) -> Gaussian:
    """One-step Gaussian ARCH(1) predictive N(theta1, theta2 + theta3*(y_prev-theta1)^2)."""
    th = _as_theta(params, 3)
    var = th[1] + th[2] * (y_prev - th[0]) ** 2
    return Gaussian(th[0], math.sqrt(var))


def skew_arch1_predictive(params, y_prev: float) -> LocScale:
    """ARCH(1) predictive with standardized skew-normal innovations."""
    th = _as_theta(params, 4)
    var = th[1] + th[2] * (y_prev - th[0]) ** 2
    return LocScale(StdSkewNormal(th[3]), th[0], math.sqrt(var))


def arch_variance_path(theta, y):
    """Conditional variances, element i predicting y[i+1] (last = next step)."""
    mu, omega, a3 = theta[0], theta[1], theta[2]
    return omega + a3 * (y - mu) ** 2


def garch11_filter(params, series, sigma2_init: float):
    """GARCH(1,1) conditional-variance recursion.

    Element ``i`` of the result is the variance conditioning on observations
    through ``series[i]`` (so it predicts ``series[i+1]``); the final element
    feeds the one-step-ahead predictive.
    """
    th = _as_theta(params, 4)
    if not (sigma2_init > 0.0):
        raise InvalidInputError("sigma2_init must be positive")
    y = np.asarray(series, dtype=float)
    driver = th[1] + th[2] * (y - th[0]) ** 2
    s2, _ = lfilter([1.0], [1.0, -th[3]], driver, zi=[th[3] * sigma2_init])
    return s2


def garch11_predictive(params, series, sigma2_init: float | None = None) -> Gaussian:
    """One-step Gaussian GARCH(1,1) predictive from the filtered variance."""
    y = np.asarray(series, dtype=float)
    if sigma2_init is None:
        sigma2_init = float(np.var(y))
    th = _as_theta(params, 4)
    s2 = garch11_filter(th, y, sigma2_init)
    return Gaussian(th[0], math.sqrt(s2[-1]))


def mixture_predictive(weight: MixtureWeight, series, sigma2_init=None) -> Mixture:
    """Linear pool of the skew-normal ARCH and Gaussian GARCH predictives."""
    y = np.asarray(series, dtype=float)
    p1 = skew_arch1_predictive(weight.psi1, y[-1])
    p2 = garch11_predictive(weight.psi2, y, sigma2_init)
    return Mixture([weight.theta1, 1.0 - weight.theta1], [p1, p2])


def gaussian_es(mu: float, sigma: float, alpha: float, tail: str) -> float:
    """Closed-form Gaussian expected shortfall.

    ``tail="lower"`` returns the negative of the conditional mean below the
    alpha-quantile (the worst-case loss of a long position); ``tail="upper"``
    returns the conditional mean above the alpha-quantile (relevant for a
    short position, with alpha typically close to 1).
    """
    if not (0.0 < alpha < 1.0):
        raise InvalidInputError("alpha must lie in (0, 1)")
    if not (sigma > 0.0):
        raise InvalidInputError("sigma must be positive")
    z = ndtri(alpha)
    phi_z = math.exp(-0.5 * (z * z + _LOG_2PI))
    if tail == "lower":
        return -(mu - sigma * phi_z / alpha)
    if tail == "upper":
        return mu + sigma * phi_z / (1.0 - alpha)
    raise InvalidInputError(f"tail must be 'lower' or 'upper', got {tail!r}")


# ---------------------------------------------------------------------------
# ETS (additive error, non-seasonal)


def ets_filter(trend, theta1, theta2, theta4, l0, b0, y, return_states=False):
    """Run the innovations state-space recursion over ``y``.

    Returns ``(level_end, trend_end, residuals)`` or, with
    ``return_states=True``, ``(levels, trends, residuals)`` where
    ``levels[t]``/``trends[t]`` are the states after observing ``y[:t]``
    (index 0 holds the initial states).
    """
    y = np.asarray(y, dtype=float)
    n = y.size
    phi = {"none": 0.0, "additive": 1.0, "damped": theta4}[trend]
    beta = 0.0 if trend == "none" else theta2
    levels = np.empty(n + 1)
    trends = np.empty(n + 1)
    resid = np.empty(n)
    l_cur, b_cur = l0, (0.0 if trend == "none" else b0)
    levels[0], trends[0] = l_cur, b_cur
    for t in range(n):
        f = l_cur + phi * b_cur
        e = y[t] - f
        l_cur = f + theta1 * e
        b_cur = phi * b_cur + beta * e
        resid[t] = e
        levels[t + 1], trends[t + 1] = l_cur, b_cur
    if return_states:
        return levels, trends, resid
    return l_cur, b_cur, resid


def ets_trend_weights(trend, theta4, horizon):
    """Cumulative trend multipliers c_h for h = 1..horizon."""
    h = np.arange(1, horizon + 1, dtype=float)
    if trend == "none":
        return np.zeros(horizon)
    if trend == "additive":
        return h
    phi = theta4
    return phi * (1.0 - phi**h) / (1.0 - phi)


def ets_variance_factors(trend, theta1, theta2, theta4, horizon):
    """Multipliers v_h with Var[y_{t+h}] = sigma2 * v_h (class-1 formulas)."""
    beta = 0.0 if trend == "none" else theta2
    c = ets_trend_weights(trend, theta4, horizon)
    # c_j enters the variance through the forecast-error weights alpha + beta*c_j
    wts = (theta1 + beta * c) ** 2
    v = np.empty(horizon)
    v[0] = 1.0
    if horizon > 1:
        v[1:] = 1.0 + np.cumsum(wts[:-1])
    return v


def ets_predictive(spec: EtsSpec, h: int) -> Gaussian:
    """Gaussian h-step-ahead predictive from the spec's forecast origin."""
    if not (isinstance(h, (int, np.integer)) and h >= 1):
        raise InvalidInputError("horizon must be an integer >= 1")
    l_end = spec.l0 if spec.level_end is None else spec.level_end
    b_end = spec.b0 if spec.trend_end is None else spec.trend_end
    c = ets_trend_weights(spec.trend, spec.theta4, h)
    v = ets_variance_factors(spec.trend, spec.theta1, spec.theta2, spec.theta4, h)
    mean = l_end + (c[-1] * b_end if spec.trend != "none" else 0.0)
    return Gaussian(mean, math.sqrt(spec.sigma2 * v[-1]))


def _ets_neg_loglik(u, trend, y):
    theta1 = _sigmoid(u[0])
    if trend == "none":
        theta2, theta4 = 0.0, 1.0
        l0, b0 = u[1], 0.0
    elif trend == "additive":
        theta2, theta4 = _sigmoid(u[1]), 1.0
        l0, b0 = u[2], u[3]
    else:
        theta2 = _sigmoid(u[1])
        theta4 = 0.8 + 0.18 * _sigmoid(u[2])
        l0, b0 = u[3], u[4]
    _, _, resid = ets_filter(trend, theta1, theta2, theta4, l0, b0, y)
    s2 = float(np.mean(resid**2))
    if s2 <= 0.0 or not np.isfinite(s2):
        return 1e300
    n = y.size
    return 0.5 * n * (math.log(2.0 * math.pi * s2) + 1.0)


def _ets_spec_from_u(u, trend, y):
    theta1 = _unit_interior(u[0])
    if trend == "none":
        spec = EtsSpec("none", theta1, l0=u[1])
    elif trend == "additive":
        spec = EtsSpec("additive", theta1, theta2=_unit_interior(u[1]), l0=u[2], b0=u[3])
    else:
        spec = EtsSpec(
            "damped",
            theta1,
            theta2=_unit_interior(u[1]),
            theta4=float(np.clip(0.8 + 0.18 * _sigmoid(u[2]), 0.8 + 1e-12, 0.98 - 1e-12)),
            l0=u[3],
            b0=u[4],
        )
    l_end, b_end, resid = ets_filter(
        spec.trend, spec.theta1, spec.theta2, spec.theta4, spec.l0, spec.b0, y
    )
    sigma2 = float(np.mean(resid**2))
    return replace(spec, sigma2=sigma2, level_end=l_end, trend_end=b_end)


def ets_select_and_fit(series) -> EtsSpec:
    """Fit the none/additive/damped trend variants and pick the AIC minimizer.

    AIC counts smoothing parameters, initial states and the residual
    variance; sigma2 is set to the mean squared one-step residual.
    """
    y = np.asarray(series, dtype=float)
    if y.size < 8:
        raise InvalidInputError("need at least 8 observations to fit an ETS spec")
    slope0 = (y[-1] - y[0]) / max(y.size - 1, 1)
    starts = {
        "none": np.array([_logit(0.3), y[0]]),
        "additive": np.array([_logit(0.3), _logit(0.1), y[0], slope0]),
        "damped": np.array([_logit(0.3), _logit(0.1), 0.0, y[0], slope0]),
    }
    n_free = {"none": 1, "additive": 2, "damped": 3}
    n_states = {"none": 1, "additive": 2, "damped": 2}
    best_spec, best_aic = None, np.inf
    errors = []
    for trend in ("none", "additive", "damped"):
        try:
            u, nll, _, _ = _simplex_minimize(
                lambda u, tr=trend: _ets_neg_loglik(u, tr, y), starts[trend]
            )
        except ConvergenceError as exc:
            errors.append((trend, exc))
            continue
        aic = 2.0 * nll + 2.0 * (n_free[trend] + n_states[trend] + 1)
        if aic < best_aic:
            best_aic = aic
            best_spec = replace(_ets_spec_from_u(u, trend, y), aic=aic)
    if best_spec is None:
        raise ConvergenceError(f"all ETS fits failed: {errors}")
    return best_spec


# ---------------------------------------------------------------------------
# simplex MLE machinery


def _sigmoid(u):
    return expit(u)


def _unit_interior(u):
    # keep optimizer output strictly inside the open unit interval
    return float(np.clip(expit(u), 1e-12, 1.0 - 1e-12))


def _logit(p):
    return math.log(p / (1.0 - p))


def _simplex_minimize(fun, x0, restarts=3, max_iter=2000, seed=12345):
    """Nelder-Mead with jittered restarts; returns (x, f, converged, nit)."""
    rng = np.random.default_rng(seed)
    best = None
    any_converged = False
    total_nit = 0
    for r in range(restarts):
        start = np.asarray(x0, dtype=float)
        if r > 0:
            start = start + 0.2 * rng.standard_normal(start.size)
        res = minimize(
            fun,
            start,
            method="Nelder-Mead",
            options={"maxiter": max_iter, "fatol": 1e-10, "xatol": 1e-8},
        )
        total_nit += res.nit
        any_converged = any_converged or bool(res.success)
        if best is None or res.fun < best.fun:
            best = res
    if not any_converged:
        raise ConvergenceError(
            f"simplex search did not converge within {max_iter} iterations",
            best_x=best.x,
            best_value=-best.fun,
        )
    return best.x, best.fun, any_converged, total_nit


def fit_mle(class_id: str, series) -> FitResult:
    """Maximum likelihood fit by derivative-free simplex search.

    The search runs over an unconstrained reparameterization (log for
    positive parameters, logit for unit-interval ones) and the result is
    reported in natural space.
    """
    y = np.asarray(series, dtype=float)
    if y.size < 30:
        raise InvalidInputError("need at least 30 observations for an MLE fit")
    model = model_class(class_id)
    u0 = model.to_unconstrained(model.start(y))

    def neg_ll(u):
        ll = model.loglik(model.from_unconstrained(u), y)
        return -ll if np.isfinite(ll) else 1e300

    u, nll, converged, nit = _simplex_minimize(neg_ll, u0)
    theta = model.from_unconstrained(u)
    return FitResult(
        params=model.params_record(theta),
        loglik=-nll,
        converged=converged,
        iterations=nit,
        boundary=bool(np.any(np.abs(u) > 25.0)),
    )


# ---------------------------------------------------------------------------
# predictive-class objects used by the posterior samplers


def _gaussian_loglik_terms(mu, s2, targets):
    r = targets - mu
    return -0.5 * (np.log(2.0 * np.pi * s2) + r * r / s2)


class Arch1Class:
    """Gaussian ARCH(1) predictive class with prior density 1/theta2."""

    class_id = "arch"
    param_names = ("theta1", "theta2", "theta3")
    dim = 3
    box = ((-np.inf, np.inf), (0.0, np.inf), (0.0, 1.0))

    def in_support(self, theta):
        return theta[1] > 0.0 and 0.0 <= theta[2] < 1.0

    def log_prior(self, theta):
        if not self.in_support(theta):
            return -np.inf
        return -math.log(theta[1])

    def start(self, y):
        v = max(float(np.var(y)), 1e-8)
        return np.array([float(np.mean(y)), 0.8 * v, 0.1])

    def to_unconstrained(self, theta):
        return np.array([theta[0], math.log(theta[1]), _logit(min(max(theta[2], 1e-8), 1 - 1e-8))])

    def from_unconstrained(self, u):
        return np.array([u[0], math.exp(u[1]), _sigmoid(u[2])])

    def params_record(self, theta):
        return ArchParams(*map(float, theta))

    def variance_path(self, theta, y):
        return arch_variance_path(theta, y)

    def loglik(self, theta, y):
        if not self.in_support(theta):
            return -np.inf
        s2 = self.variance_path(theta, y)[:-1]
        return float(np.sum(_gaussian_loglik_terms(theta[0], s2, y[1:])))

    def predictive(self, theta, y) -> Gaussian:
        return arch1_predictive(theta, float(np.asarray(y)[-1]))

    def mean_predictive(self, thetas, y) -> GaussianMixture:
        thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
        y_prev = float(np.asarray(y)[-1])
        var = thetas[:, 1] + thetas[:, 2] * (y_prev - thetas[:, 0]) ** 2
        return GaussianMixture(thetas[:, 0], np.sqrt(var))


class Garch11Class:
    """Gaussian GARCH(1,1) predictive class with prior density 1/theta2.

    The variance recursion is seeded with the sample variance of the
    conditioning window.
    """

    class_id = "garch"
    param_names = ("theta1", "theta2", "theta3", "theta4")
    dim = 4
    box = ((-np.inf, np.inf), (0.0, np.inf), (0.0, 1.0), (0.0, 1.0))

    def in_support(self, theta):
        return (
            theta[1] > 0.0
            and 0.0 <= theta[2] < 1.0
            and 0.0 <= theta[3] < 1.0
            and theta[2] + theta[3] < 1.0
        )

    def log_prior(self, theta):
        if not self.in_support(theta):
            return -np.inf
        return -math.log(theta[1])

    def start(self, y):
        v = max(float(np.var(y)), 1e-8)
        return np.array([float(np.mean(y)), 0.1 * v, 0.1, 0.8])

    def to_unconstrained(self, theta):
        total = min(max(theta[2] + theta[3], 1e-8), 1 - 1e-8)
        frac = min(max(theta[2] / total, 1e-8), 1 - 1e-8)
        return np.array([theta[0], math.log(theta[1]), _logit(total), _logit(frac)])

    def from_unconstrained(self, u):
        total = _sigmoid(u[2])
        frac = _sigmoid(u[3])
        return np.array([u[0], math.exp(u[1]), total * frac, total * (1.0 - frac)])

    def params_record(self, theta):
        return GarchParams(*map(float, theta))

    def variance_path(self, theta, y):
        return garch11_filter(theta, y, float(np.var(y)))

    def loglik(self, theta, y):
        if not self.in_support(theta):
            return -np.inf
        s2 = self.variance_path(theta, y)[:-1]
        return float(np.sum(_gaussian_loglik_terms(theta[0], s2, y[1:])))

    def predictive(self, theta, y) -> Gaussian:
        s2 = self.variance_path(theta, np.asarray(y, dtype=float))
        return Gaussian(theta[0], math.sqrt(s2[-1]))

    def mean_predictive(self, thetas, y) -> GaussianMixture:
        thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
        y = np.asarray(y, dtype=float)
        sig = np.empty(thetas.shape[0])
        v0 = float(np.var(y))
        for j, th in enumerate(thetas):
            sig[j] = math.sqrt(garch11_filter(th, y, v0)[-1])
        return GaussianMixture(thetas[:, 0], sig)


class SkewArch1Class:
    """ARCH(1) with standardized skew-normal innovations (pool constituent)."""

    class_id = "arch_skew"
    param_names = ("theta1", "theta2", "theta3", "gamma")
    dim = 4
    box = ((-np.inf, np.inf), (0.0, np.inf), (0.0, 1.0), (-np.inf, np.inf))

    def in_support(self, theta):
        return theta[1] > 0.0 and 0.0 <= theta[2] < 1.0 and np.isfinite(theta[3])

    def log_prior(self, theta):
        if not self.in_support(theta):
            return -np.inf
        return -math.log(theta[1])

    def start(self, y):
        v = max(float(np.var(y)), 1e-8)
        sd = max(float(np.std(y)), 1e-8)
        skew = float(np.mean(((y - np.mean(y)) / sd) ** 3))
        return np.array([float(np.mean(y)), 0.8 * v, 0.1, -2.0 if skew < 0 else 2.0])

    def to_unconstrained(self, theta):
        return np.array(
            [theta[0], math.log(theta[1]), _logit(min(max(theta[2], 1e-8), 1 - 1e-8)), theta[3]]
        )

    def from_unconstrained(self, u):
        return np.array([u[0], math.exp(u[1]), _sigmoid(u[2]), u[3]])

    def params_record(self, theta):
        return SkewArchParams(*map(float, theta))

    def variance_path(self, theta, y):
        return arch_variance_path(theta, y)

    def loglik(self, theta, y):
        if not self.in_support(theta):
            return -np.inf
        base = StdSkewNormal(theta[3])
        s2 = self.variance_path(theta, y)[:-1]
        s = np.sqrt(s2)
        z = (y[1:] - theta[0]) / s
        return float(np.sum(base.logpdf(z) - np.log(s)))

    def predictive(self, theta, y) -> LocScale:
        return skew_arch1_predictive(theta, float(np.asarray(y)[-1]))

    def mean_predictive(self, thetas, y):
        thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
        comps = [self.predictive(th, y) for th in thetas]
        return Mixture(np.full(len(comps), 1.0 / len(comps)), comps)


class LinearPoolClass:
    """Two-component linear pool with frozen constituents and free weight."""

    class_id = "pool"
    param_names = ("theta1",)
    dim = 1
    box = ((0.0, 1.0),)

    def __init__(self, psi1: SkewArchParams, psi2: GarchParams):
        self.psi1 = psi1
        self.psi2 = psi2

    def in_support(self, theta):
        return 0.0 < theta[0] < 1.0

    def log_prior(self, theta):
        return 0.0 if self.in_support(theta) else -np.inf

    def start(self, y):
        return np.array([0.5])

    def to_unconstrained(self, theta):
        return np.array([_logit(min(max(theta[0], 1e-8), 1 - 1e-8))])

    def from_unconstrained(self, u):
        return np.array([_sigmoid(u[0])])

    def params_record(self, theta):
        return MixtureWeight(float(theta[0]), self.psi1, self.psi2)

    def component_paths(self, y):
        """Per-step conditional (mu, sigma) paths of both constituents.

        Element i of each sigma path predicts y[i+1]; the final element is
        the one-step-ahead scale.
        """
        y = np.asarray(y, dtype=float)
        th1 = self.psi1.as_array()
        s1 = np.sqrt(arch_variance_path(th1, y))
        th2 = self.psi2.as_array()
        s2 = np.sqrt(garch11_filter(th2, y, float(np.var(y))))
        return (th1[0], s1, th1[3]), (th2[0], s2)

    def predictive(self, theta, y) -> Mixture:
        w = MixtureWeight(float(theta[0]), self.psi1, self.psi2)
        return mixture_predictive(w, y)

    def mean_predictive(self, thetas, y) -> Mixture:
        thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
        w = float(np.mean(thetas[:, 0]))
        return self.predictive([w], y)


class EtsClass:
    """ETS predictive class for posterior sampling over the active smoothing
    and damping parameters; initial states and sigma2 stay frozen at the
    values carried by the spec."""

    class_id = "ets"

    def __init__(self, spec: EtsSpec):
        self.spec = spec
        if spec.trend == "none":
            self.param_names = ("theta1",)
            self.box = ((0.0, 1.0),)
        elif spec.trend == "additive":
            self.param_names = ("theta1", "theta2")
            self.box = ((0.0, 1.0), (0.0, 1.0))
        else:
            self.param_names = ("theta1", "theta2", "theta4")
            self.box = ((0.0, 1.0), (0.0, 1.0), (0.8, 0.98))
        self.dim = len(self.param_names)

    def in_support(self, theta):
        for val, (lo, hi) in zip(theta, self.box):
            if not (lo < val < hi):
                return False
        return True

    def log_prior(self, theta):
        return 0.0 if self.in_support(theta) else -np.inf

    def start(self, y=None):
        base = {"theta1": self.spec.theta1, "theta2": self.spec.theta2, "theta4": self.spec.theta4}
        return np.array([base[name] for name in self.param_names])

    def to_unconstrained(self, theta):
        out = []
        for val, (lo, hi) in zip(theta, self.box):
            p = (val - lo) / (hi - lo)
            out.append(_logit(min(max(p, 1e-8), 1 - 1e-8)))
        return np.array(out)

    def from_unconstrained(self, u):
        frac = np.clip(_sigmoid(np.asarray(u, dtype=float)), 1e-12, 1.0 - 1e-12)
        return np.array([lo + (hi - lo) * f for f, (lo, hi) in zip(frac, self.box)])

    def expand(self, theta):
        """Active parameters -> (theta1, theta2, theta4) with frozen fill."""
        vals = dict(zip(self.param_names, theta))
        return (
            vals.get("theta1", self.spec.theta1),
            vals.get("theta2", self.spec.theta2),
            vals.get("theta4", self.spec.theta4),
        )

    def params_record(self, theta):
        theta1, theta2, theta4 = self.expand(theta)
        return replace(self.spec, theta1=theta1, theta2=theta2, theta4=theta4)

    def spec_at(self, theta, y) -> EtsSpec:
        """Spec with the given active parameters, refiltered end states."""
        theta1, theta2, theta4 = self.expand(theta)
        l_end, b_end, _ = ets_filter(
            self.spec.trend, theta1, theta2, theta4, self.spec.l0, self.spec.b0, y
        )
        return replace(
            self.spec,
            theta1=theta1,
            theta2=theta2,
            theta4=theta4,
            level_end=l_end,
            trend_end=b_end,
        )

    def predictive(self, theta, y, h: int = 1) -> Gaussian:
        return ets_predictive(self.spec_at(theta, np.asarray(y, dtype=float)), h)

    def mean_predictive(self, thetas, y, h: int = 1) -> GaussianMixture:
        return self.horizon_mixtures(thetas, y, h)[h - 1]

    def horizon_mixtures(self, thetas, y, horizon: int):
        """Per-horizon mean predictives, filtering the states once per draw."""
        thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
        y = np.asarray(y, dtype=float)
        m = thetas.shape[0]
        mus = np.empty((m, horizon))
        sds = np.empty((m, horizon))
        for j, th in enumerate(thetas):
            theta1, theta2, theta4 = self.expand(th)
            l_end, b_end, _ = ets_filter(
                self.spec.trend, theta1, theta2, theta4, self.spec.l0, self.spec.b0, y
            )
            c = ets_trend_weights(self.spec.trend, theta4, horizon)
            v = ets_variance_factors(self.spec.trend, theta1, theta2, theta4, horizon)
            mus[j] = l_end + c * b_end
            sds[j] = np.sqrt(self.spec.sigma2 * v)
        return [GaussianMixture(mus[:, k], sds[:, k]) for k in range(horizon)]


def model_class(class_id: str, **kwargs):
    """Instantiate a predictive-class object by identifier."""
    if class_id == "arch":
        return Arch1Class()
    if class_id == "garch":
        return Garch11Class()
    if class_id == "arch_skew":
        return SkewArch1Class()
    if class_id == "pool":
        return LinearPoolClass(kwargs["psi1"], kwargs["psi2"])
    if class_id == "ets":
        return EtsClass(kwargs["spec"])
    raise InvalidInputError(f"unknown model class {class_id!r}")
