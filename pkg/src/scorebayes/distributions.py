"""Scalar distribution primitives shared by the predictive models, the
simulation DGP and the evaluation harness.

Every distribution object is immutable after construction and exposes the
same duck-typed surface: ``pdf``, ``logpdf``, ``cdf``, ``ppf``, ``rvs``,
``mean`` and ``sd``. All of them accept scalars or numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import log_ndtr, logsumexp, ndtr, ndtri, owens_t

from .utils import InvalidInputError

__all__ = [
    "Gaussian",
    "StdSkewNormal",
    "LocScale",
    "EmpiricalCdf",
    "Mixture",
    "GaussianMixture",
    "std_skew_normal",
    "empirical_cdf",
]

_LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class Gaussian:
    """Normal distribution with location ``mu`` and scale ``sigma > 0``."""

    mu: float
    sigma: float

    def __post_init__(self):
        if not (self.sigma > 0.0) or not np.isfinite(self.sigma):
            raise InvalidInputError(f"sigma must be positive and finite, got {self.sigma}")

    def pdf(self, x):
        z = (np.asarray(x, dtype=float) - self.mu) / self.sigma
        return np.exp(-0.5 * (z * z + _LOG_2PI)) / self.sigma

    def logpdf(self, x):
        z = (np.asarray(x, dtype=float) - self.mu) / self.sigma
        return -0.5 * (z * z + _LOG_2PI) - math.log(self.sigma)

    def cdf(self, x):
        return ndtr((np.asarray(x, dtype=float) - self.mu) / self.sigma)

    def ppf(self, p):
        return self.mu + self.sigma * ndtri(np.asarray(p, dtype=float))

    def rvs(self, size, rng):
        return self.mu + self.sigma * rng.standard_normal(size)

    def mean(self):
        return self.mu

    def sd(self):
        return self.sigma


@dataclass(frozen=True)
class StdSkewNormal:
    """Skew-normal shape ``gamma``, standardized to zero mean / unit variance.

    The underlying raw density is 2*phi(r)*Phi(gamma*r); the raw variable has
    mean ``delta*sqrt(2/pi)`` and variance ``1 - 2*delta^2/pi`` with
    ``delta = gamma / sqrt(1 + gamma^2)``. This class works on the variable
    standardized with those analytic moments, so ``gamma = 0`` reduces exactly
    to the standard normal.
    """

    gamma: float

    def __post_init__(self):
        if not np.isfinite(self.gamma):
            raise InvalidInputError(f"gamma must be finite, got {self.gamma}")

    @property
    def delta(self) -> float:
        return self.gamma / math.sqrt(1.0 + self.gamma * self.gamma)

    @property
    def mean_raw(self) -> float:
        return self.delta * math.sqrt(2.0 / math.pi)

    @property
    def sd_raw(self) -> float:
        return math.sqrt(1.0 - 2.0 * self.delta * self.delta / math.pi)

    def _raw(self, x):
        return self.mean_raw + self.sd_raw * np.asarray(x, dtype=float)

    def pdf(self, x):
        r = self._raw(x)
        return (
            2.0
            * self.sd_raw
            * np.exp(-0.5 * (r * r + _LOG_2PI))
            * ndtr(self.gamma * r)
        )

    def logpdf(self, x):
        r = self._raw(x)
        return (
            math.log(2.0 * self.sd_raw)
            - 0.5 * (r * r + _LOG_2PI)
            + log_ndtr(self.gamma * r)
        )

    def cdf(self, x):
        r = self._raw(x)
        return ndtr(r) - 2.0 * owens_t(r, self.gamma)

    def ppf(self, p, tol=1e-10):
        p = np.asarray(p, dtype=float)
        return _bisect_cdf(self.cdf, p, lo=-16.0, hi=16.0, tol=tol)

    def rvs(self, size, rng):
        u0 = rng.standard_normal(size)
        u1 = rng.standard_normal(size)
        d = self.delta
        raw = d * np.abs(u0) + math.sqrt(1.0 - d * d) * u1
        return (raw - self.mean_raw) / self.sd_raw

    def mean(self):
        return 0.0

    def sd(self):
        return 1.0


@dataclass(frozen=True)
class LocScale:
    """Location/scale transform ``y = mu + sigma * x`` of a standardized base."""

    base: object
    mu: float
    sigma: float

    def __post_init__(self):
        if not (self.sigma > 0.0):
            raise InvalidInputError("sigma must be positive")

    def _z(self, y):
        return (np.asarray(y, dtype=float) - self.mu) / self.sigma

    def pdf(self, y):
        return self.base.pdf(self._z(y)) / self.sigma

    def logpdf(self, y):
        return self.base.logpdf(self._z(y)) - math.log(self.sigma)

    def cdf(self, y):
        return self.base.cdf(self._z(y))

    def ppf(self, p):
        return self.mu + self.sigma * self.base.ppf(p)

    def rvs(self, size, rng):
        return self.mu + self.sigma * self.base.rvs(size, rng)

    def mean(self):
        return self.mu + self.sigma * self.base.mean()

    def sd(self):
        return self.sigma * self.base.sd()


class EmpiricalCdf:
    """Interpolated empirical CDF with i/(N+1) plotting positions.

    The i-th order statistic is assigned value i/(N+1), with linear
    interpolation between order statistics; tied samples share the average
    of their plotting positions. Evaluation outside the sample range clamps
    to [1/(N+1), N/(N+1)], so the quantile inverse is always well defined.
    """

    def __init__(self, samples):
        s = np.sort(np.asarray(samples, dtype=float))
        if s.size < 2:
            raise InvalidInputError("need at least 2 samples for an empirical CDF")
        if not np.all(np.isfinite(s)):
            raise InvalidInputError("samples must all be finite")
        n = s.size
        vals, counts = np.unique(s, return_counts=True)
        ends = np.cumsum(counts)          # 1-based rank of last member of each tie group
        starts = ends - counts + 1        # 1-based rank of first member
        self._x = vals
        self._p = (starts + ends) / (2.0 * (n + 1.0))
        self.n = n
        self.p_lo = 1.0 / (n + 1.0)
        self.p_hi = n / (n + 1.0)
        self.sorted_samples = s

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        inner = np.interp(x, self._x, self._p)
        out = np.where(x < self._x[0], self.p_lo, inner)
        out = np.where(x > self._x[-1], self.p_hi, out)
        if x.ndim == 0:
            return float(out)
        return out

    def ppf(self, q):
        q = np.clip(np.asarray(q, dtype=float), self._p[0], self._p[-1])
        out = np.interp(q, self._p, self._x)
        if q.ndim == 0:
            return float(out)
        return out

    # alias used by code that treats this like the other distributions
    quantile = ppf


class Mixture:
    """Finite mixture of arbitrary component distributions."""

    def __init__(self, weights, components):
        w = np.asarray(weights, dtype=float)
        if w.ndim != 1 or len(components) != w.size:
            raise InvalidInputError("weights and components must align")
        if np.any(w < 0.0):
            raise InvalidInputError("weights must be nonnegative")
        if abs(w.sum() - 1.0) > 1e-12:
            raise InvalidInputError(f"weights must sum to 1, got {w.sum()!r}")
        self.weights = w
        self.components = list(components)

    def pdf(self, x):
        return sum(w * c.pdf(x) for w, c in zip(self.weights, self.components))

    def logpdf(self, x):
        x = np.asarray(x, dtype=float)
        logps = np.stack([c.logpdf(x) for c in self.components])
        with np.errstate(divide="ignore"):
            logw = np.log(self.weights)
        out = logsumexp(logps + logw.reshape((-1,) + (1,) * x.ndim), axis=0)
        if x.ndim == 0:
            return float(out)
        return out

    def cdf(self, x):
        return sum(w * c.cdf(x) for w, c in zip(self.weights, self.components))

    def ppf(self, p, tol=1e-8):
        p = np.asarray(p, dtype=float)
        los = np.stack([np.asarray(c.ppf(p), dtype=float) for c in self.components])
        lo = los.min(axis=0)
        hi = los.max(axis=0)
        return _bisect_cdf(self.cdf, p, lo=lo, hi=hi, tol=tol)

    def rvs(self, size, rng):
        idx = rng.choice(len(self.components), size=size, p=self.weights)
        out = np.empty(size, dtype=float)
        for k, comp in enumerate(self.components):
            mask = idx == k
            cnt = int(mask.sum())
            if cnt:
                out[mask] = comp.rvs(cnt, rng)
        return out

    def mean(self):
        return float(sum(w * c.mean() for w, c in zip(self.weights, self.components)))

    def sd(self):
        m = self.mean()
        second = sum(
            w * (c.sd() ** 2 + c.mean() ** 2)
            for w, c in zip(self.weights, self.components)
        )
        return math.sqrt(max(second - m * m, 0.0))


class GaussianMixture:
    """Equally- or explicitly-weighted mixture of Gaussians, vectorized.

    Used for posterior mean predictives, where the component count equals
    the number of retained draws; all evaluations are O(#components) numpy
    operations.
    """

    def __init__(self, mus, sigmas, weights=None):
        self.mus = np.asarray(mus, dtype=float).ravel()
        self.sigmas = np.asarray(sigmas, dtype=float).ravel()
        if self.mus.size != self.sigmas.size or self.mus.size == 0:
            raise InvalidInputError("mus and sigmas must be equal-length and nonempty")
        if np.any(self.sigmas <= 0.0):
            raise InvalidInputError("all sigmas must be positive")
        if weights is None:
            self.weights = np.full(self.mus.size, 1.0 / self.mus.size)
        else:
            self.weights = np.asarray(weights, dtype=float).ravel()
            if abs(self.weights.sum() - 1.0) > 1e-12 or np.any(self.weights < 0):
                raise InvalidInputError("weights must be nonnegative and sum to 1")

    def _zgrid(self, x):
        x = np.asarray(x, dtype=float)
        return (x[..., None] - self.mus) / self.sigmas

    def pdf(self, x):
        z = self._zgrid(x)
        vals = np.exp(-0.5 * (z * z + _LOG_2PI)) / self.sigmas
        out = vals @ self.weights
        return float(out) if np.ndim(x) == 0 else out

    def logpdf(self, x):
        z = self._zgrid(x)
        logs = -0.5 * (z * z + _LOG_2PI) - np.log(self.sigmas) + np.log(self.weights)
        out = logsumexp(logs, axis=-1)
        return float(out) if np.ndim(x) == 0 else out

    def cdf(self, x):
        out = ndtr(self._zgrid(x)) @ self.weights
        return float(out) if np.ndim(x) == 0 else out

    def ppf(self, p, tol=1e-8):
        p = np.asarray(p, dtype=float)
        zp = ndtri(p)
        qs = self.mus + np.multiply.outer(zp, self.sigmas)
        lo = qs.min(axis=-1)
        hi = qs.max(axis=-1)
        return _bisect_cdf(self.cdf, p, lo=lo, hi=hi, tol=tol)

    def rvs(self, size, rng):
        idx = rng.choice(self.mus.size, size=size, p=self.weights)
        return self.mus[idx] + self.sigmas[idx] * rng.standard_normal(size)

    def mean(self):
        return float(self.weights @ self.mus)

    def sd(self):
        m = self.mean()
        second = self.weights @ (self.sigmas**2 + self.mus**2)
        return math.sqrt(max(second - m * m, 0.0))


def _bisect_cdf(cdf, p, lo, hi, tol, max_iter=200):
    """Invert a monotone CDF by bisection; broadcasts over p."""
    from .utils import NumericalError

    p = np.asarray(p, dtype=float)
    lo = np.broadcast_to(np.asarray(lo, dtype=float), p.shape).copy()
    hi = np.broadcast_to(np.asarray(hi, dtype=float), p.shape).copy()
    # widen until the bracket contains the target probability
    for _ in range(200):
        bad_lo = cdf(lo) > p
        bad_hi = cdf(hi) < p
        if not (np.any(bad_lo) or np.any(bad_hi)):
            break
        width = np.maximum(hi - lo, 1.0)
        lo = np.where(bad_lo, lo - width, lo)
        hi = np.where(bad_hi, hi + width, hi)
    else:
        raise NumericalError(
            f"quantile bracket failure: p={p!r}, bracket=({lo!r}, {hi!r})"
        )
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        high_side = cdf(mid) >= p
        hi = np.where(high_side, mid, hi)
        lo = np.where(high_side, lo, mid)
        if np.max(hi - lo) < tol:
            break
    out = 0.5 * (lo + hi)
    if p.ndim == 0:
        return float(out)
    return out


def std_skew_normal(gamma: float) -> StdSkewNormal:
    """Standardized skew-normal with shape parameter ``gamma``."""
    return StdSkewNormal(float(gamma))


def empirical_cdf(samples) -> EmpiricalCdf:
    """Interpolated empirical CDF of ``samples`` (at least two required)."""
    return EmpiricalCdf(samples)
