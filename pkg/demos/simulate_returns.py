"""Simulate the stochastic-volatility return process and inspect its
stylized facts: negative skewness from the inverse skew-normal marginal and
volatility clustering inherited from the latent log-variance path.

Run:  python demos/simulate_returns.py
"""

import numpy as np

from scorebayes import SvSkewConfig, simulate_sv_skew, true_conditional_predictive
from scorebayes.evaluation import sample_es

config = SvSkewConfig()  # AR(1) log variance, shape -5 marginal
y, h = simulate_sv_skew(config, n=2500, seed=7)

z = (y - y.mean()) / y.std()
print(f"simulated {y.size} observations")
print(f"  sample skewness : {np.mean(z**3):+.3f}   (negative by construction)")
print(f"  excess kurtosis : {np.mean(z**4) - 3:+.3f}")

# squared-return autocorrelations show the volatility clustering
sq = y**2 - np.mean(y**2)
acf = [float(np.sum(sq[k:] * sq[:-k]) / np.sum(sq * sq)) for k in (1, 2, 3)]
print(f"  squared-return ACF(1..3): {[round(a, 3) for a in acf]}")

# the latent state is known in simulation, so the one-step-ahead oracle
# predictive is available by Monte Carlo
sample = true_conditional_predictive(config, h[-1], sample_size=200_000, seed=8)
print("\noracle predictive for the next observation:")
print(f"  10% quantile : {np.quantile(sample, 0.1):+.4f}")
print(f"  90% quantile : {np.quantile(sample, 0.9):+.4f}")
print(f"  lower ES(10%): {sample_es(sample, 0.1, 'lower'):+.4f}")
print(f"  upper ES(90%): {sample_es(sample, 0.9, 'upper'):+.4f}")
