"""VaR and expected-shortfall backtesting of the posterior mean predictive.

An expanding-window run records 10%/90% VaR forecasts and the matching ES
forecasts at every step; exceedance rates are then compared to the nominal
tail probabilities and tested for correct coverage plus independent
violations. The full CSV/JSON report lands in demos/output/var_es/.

Run:  python demos/var_es_backtest.py       (about a minute)
"""

from scorebayes import (
    BacktestConfig,
    ChainSettings,
    SvSkewConfig,
    expanding_backtest,
    simulate_sv_skew,
    var_exceedance,
    write_report,
)
from scorebayes.models import Arch1Class

y, _ = simulate_sv_skew(SvSkewConfig(), n=500, seed=11)

config = BacktestConfig(
    initial_window=300,
    steps=200,
    update_rules=("ls", "cs<10"),
    eval_rules=("ls",),
    var_levels=(0.1, 0.9),
    es_levels=(0.1, 0.9),
    es_mc_draws=50_000,
    chain=ChainSettings(burn_in=1000, iters=2000, thin=2),
    warm_burn_in=200,
    seed=11,
)
report = expanding_backtest(y, Arch1Class(), config)

for rule in config.update_rules:
    print(f"update rule {rule!r}:")
    for level in config.var_levels:
        rec = report.exceedances[rule][level]
        res = report.christoffersen[rule][level]
        print(
            f"  VaR {level:.0%}: empirical exceedance {var_exceedance(rec):.3f}"
            f" (nominal {rec.alpha:.2f}), coverage/independence LR {res.lr_cc:.2f}"
            f" -> {'reject' if res.reject_at_1pct else 'accept'} at 1%"
        )
    for level in config.es_levels:
        tail = "lower" if level < 0.5 else "upper"
        mean_es = float(report.es_forecasts[rule][level].mean())
        print(f"  mean {tail}-tail ES forecast at {level:.0%}: {mean_es:+.4f}")

write_report(report, "demos/output/var_es")
print("\nreport written to demos/output/var_es/")
