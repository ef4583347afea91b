import numpy as np
import pytest


def simulate_arch(theta, n, seed):
    """Gaussian ARCH(1) sample path started from the stationary scale."""
    mu, omega, a1 = theta
    rng = np.random.default_rng(seed)
    y = np.empty(n)
    y[0] = mu + np.sqrt(omega / (1.0 - a1)) * rng.standard_normal()
    eps = rng.standard_normal(n)
    for t in range(1, n):
        s2 = omega + a1 * (y[t - 1] - mu) ** 2
        y[t] = mu + np.sqrt(s2) * eps[t]
    return y


def simulate_garch(theta, n, seed):
    mu, omega, a1, b1 = theta
    rng = np.random.default_rng(seed)
    s2 = omega / (1.0 - a1 - b1)
    y_prev = mu
    y = np.empty(n)
    for t in range(n):
        s2 = omega + a1 * (y_prev - mu) ** 2 + b1 * s2
        y_prev = mu + np.sqrt(s2) * rng.standard_normal()
        y[t] = y_prev
    return y


@pytest.fixture(scope="session")
def arch_series():
    return simulate_arch((0.0, 0.5, 0.3), 5000, seed=20240605)


@pytest.fixture(scope="session")
def garch_series():
    return simulate_garch((0.0, 0.05, 0.1, 0.85), 5000, seed=20240606)
