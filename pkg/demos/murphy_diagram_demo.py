"""Murphy diagram for expected-shortfall forecasts.

Two forecasters quote (VaR, ES) for the lower 10% tail of N(0,1) data: one
quotes the true functionals, the other those of an over-dispersed N(0,4).
The scoring function family indexed by eta is averaged over the evaluation
period for both, and the difference plotted (here: printed) with
moving-block bootstrap bands. Dominance of the truthful forecaster shows as
a nonnegative curve.

Run:  python demos/murphy_diagram_demo.py
"""

import numpy as np

from scorebayes import murphy_diagram, write_murphy_csv

rng = np.random.default_rng(3)
T = 1000
actuals = rng.standard_normal(T)

var_true, es_true = -1.2816, 1.7550     # N(0,1) functionals, signed ES
var_wide, es_wide = -2.5631, 3.5100     # N(0,4) functionals

grid = murphy_diagram(
    np.full(T, var_true),
    np.full(T, es_true),
    np.full(T, var_wide),
    np.full(T, es_wide),
    actuals,
    alpha=0.1,
    eta_grid=np.linspace(-4.0, 4.0, 17),
    block_len=10,
    reps=1000,
    seed=5,
)

print("eta      delta     [95% bootstrap band]")
for eta, d, lo, hi in zip(grid.etas, grid.deltas, grid.ci_lower, grid.ci_upper):
    marker = " *" if lo > 0 else ""
    print(f"{eta:+5.1f}  {d:+8.4f}   [{lo:+8.4f}, {hi:+8.4f}]{marker}")
print("\n(* band excludes zero: the truthful forecaster wins significantly)")

import os

os.makedirs("demos/output", exist_ok=True)
write_murphy_csv("demos/output/murphy.csv", grid, "alpha=0.1 block_len=10 replications=1000")
print("grid written to demos/output/murphy.csv")
