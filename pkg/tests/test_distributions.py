import math

import numpy as np
import pytest
from scipy.integrate import quad

from scorebayes import (
    EmpiricalCdf,
    Gaussian,
    GaussianMixture,
    InvalidInputError,
    LocScale,
    Mixture,
    StdSkewNormal,
    empirical_cdf,
    std_skew_normal,
)


def test_gaussian_density_at_zero():
    assert abs(Gaussian(0, 1).pdf(0.0) - 0.3989422804014327) < 1e-12


def test_gaussian_requires_positive_sigma():
    with pytest.raises(InvalidInputError):
        Gaussian(0, 0.0)
    with pytest.raises(InvalidInputError):
        Gaussian(0, -1.0)


def test_skew_normal_gamma_zero_is_standard_normal():
    ssn = std_skew_normal(0.0)
    grid = np.linspace(-5, 5, 101)
    ref = Gaussian(0, 1)
    assert np.max(np.abs(ssn.pdf(grid) - ref.pdf(grid))) < 1e-10
    assert np.max(np.abs(ssn.cdf(grid) - ref.cdf(grid))) < 1e-10


def test_skew_normal_standardization_by_monte_carlo():
    ssn = std_skew_normal(-5.0)
    rng = np.random.default_rng(11)
    x = ssn.rvs(1_000_000, rng)
    assert abs(x.mean()) < 0.01
    assert abs(x.var() - 1.0) < 0.02


def test_skew_normal_quantile_inverse_identity():
    ssn = std_skew_normal(-5.0)
    assert abs(ssn.ppf(ssn.cdf(-1.3)) - (-1.3)) < 1e-6


def test_skew_normal_cdf_matches_density_quadrature():
    ssn = std_skew_normal(-3.0)
    for x in (-1.5, -0.2, 0.4, 1.1):
        ref, _ = quad(ssn.pdf, -14.0, x, limit=200)
        assert abs(ssn.cdf(x) - ref) < 1e-9


def test_skew_normal_rejects_nonfinite_shape():
    with pytest.raises(InvalidInputError):
        std_skew_normal(np.inf)


@pytest.mark.parametrize(
    "dist,interior",
    [
        (Gaussian(0.3, 1.7), (-4.0, 5.0)),
        (StdSkewNormal(-5.0), (-3.5, 1.5)),
        (StdSkewNormal(2.0), (-1.5, 3.5)),
        (LocScale(StdSkewNormal(-5.0), 0.2, 0.8), (-2.5, 1.3)),
        (
            Mixture([0.3, 0.7], [Gaussian(-1, 0.5), Gaussian(1.5, 1.2)]),
            (-2.0, 4.0),
        ),
        (GaussianMixture([-1.0, 0.5, 2.0], [0.5, 1.0, 0.7]), (-2.0, 3.5)),
    ],
)
def test_quantile_cdf_round_trip_on_grid(dist, interior):
    grid = np.linspace(*interior, 101)
    p = np.asarray(dist.cdf(grid))
    back = np.asarray(dist.ppf(p))
    assert np.max(np.abs(back - grid)) < 1e-6
    assert np.all(np.diff(p) >= 0)


def test_cdf_limits():
    for dist in (Gaussian(0, 1), StdSkewNormal(-5.0)):
        assert dist.cdf(-40.0) < 1e-12
        assert dist.cdf(40.0) > 1 - 1e-12


def test_empirical_cdf_median_order_statistic():
    ec = empirical_cdf([1.0, 2.0, 3.0])
    assert abs(ec.cdf(2.0) - 0.5) < 1e-15


def test_empirical_cdf_degenerate_ties():
    ec = empirical_cdf([0.0, 0.0, 0.0])
    assert 0.25 <= ec.cdf(0.0) <= 0.75


def test_empirical_cdf_monte_carlo_against_normal():
    rng = np.random.default_rng(5)
    ec = empirical_cdf(rng.standard_normal(1_000_000))
    assert abs(ec.cdf(0.0) - 0.5) < 0.002


def test_empirical_cdf_requires_two_samples():
    with pytest.raises(InvalidInputError):
        empirical_cdf([1.0])


def test_empirical_cdf_clamps_outside_support():
    ec = empirical_cdf([1.0, 2.0, 3.0, 4.0])
    assert ec.cdf(-100.0) == pytest.approx(1.0 / 5.0)
    assert ec.cdf(100.0) == pytest.approx(4.0 / 5.0)
    assert ec.ppf(0.0) == 1.0
    assert ec.ppf(1.0) == 4.0


def test_empirical_cdf_round_trip_inside_support():
    rng = np.random.default_rng(17)
    ec = empirical_cdf(rng.standard_normal(500))
    x = np.linspace(-1.5, 1.5, 101)
    assert np.max(np.abs(ec.ppf(ec.cdf(x)) - x)) < 1e-10


def test_mixture_weight_validation():
    with pytest.raises(InvalidInputError):
        Mixture([0.5, 0.6], [Gaussian(0, 1), Gaussian(1, 1)])
    with pytest.raises(InvalidInputError):
        Mixture([-0.1, 1.1], [Gaussian(0, 1), Gaussian(1, 1)])


@pytest.mark.parametrize(
    "dist",
    [
        Mixture([0.4, 0.6], [Gaussian(-1, 0.6), Gaussian(2, 1.4)]),
        Mixture([0.7, 0.3], [LocScale(StdSkewNormal(-5.0), 0, 1.1), Gaussian(0.5, 0.9)]),
        GaussianMixture(np.linspace(-2, 2, 5), np.linspace(0.5, 1.5, 5)),
    ],
)
def test_mixture_density_integrates_to_one(dist):
    m, s = dist.mean(), dist.sd()
    grid = np.linspace(m - 12 * s, m + 12 * s, 20001)
    total = np.trapezoid(dist.pdf(grid), grid)
    assert abs(total - 1.0) < 1e-4


def test_gaussian_mixture_matches_generic_mixture():
    mus = np.array([-1.0, 0.3, 2.0])
    sigmas = np.array([0.5, 1.0, 1.7])
    w = np.array([0.2, 0.5, 0.3])
    fast = GaussianMixture(mus, sigmas, w)
    generic = Mixture(w, [Gaussian(m, s) for m, s in zip(mus, sigmas)])
    grid = np.linspace(-5, 6, 301)
    assert np.max(np.abs(fast.pdf(grid) - generic.pdf(grid))) < 1e-12
    assert np.max(np.abs(fast.cdf(grid) - generic.cdf(grid))) < 1e-12
    assert np.max(np.abs(fast.logpdf(grid) - generic.logpdf(grid))) < 1e-10
    assert abs(fast.mean() - generic.mean()) < 1e-12
    assert abs(fast.sd() - generic.sd()) < 1e-12


def test_mixture_degenerate_logpdf():
    mix = Mixture([0.5, 0.5], [Gaussian(0, 1), Gaussian(0, 1)])
    assert abs(mix.logpdf(0.0) - Gaussian(0, 1).logpdf(0.0)) < 1e-12


def test_loc_scale_round_trip():
    dist = LocScale(StdSkewNormal(-5.0), 1.5, 0.4)
    assert abs(dist.mean() - 1.5) < 1e-12
    assert abs(dist.sd() - 0.4) < 1e-12
    rng = np.random.default_rng(3)
    x = dist.rvs(200_000, rng)
    assert abs(x.mean() - 1.5) < 0.005
    assert abs(x.std() - 0.4) < 0.005


def test_rvs_deterministic_per_seed():
    dist = Mixture([0.5, 0.5], [Gaussian(-1, 1), Gaussian(1, 1)])
    a = dist.rvs(1000, np.random.default_rng(42))
    b = dist.rvs(1000, np.random.default_rng(42))
    assert np.array_equal(a, b)
