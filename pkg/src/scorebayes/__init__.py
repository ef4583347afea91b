"""scorebayes: score-weighted generalized Bayesian updating of predictive
classes, with a forecast-evaluation harness for volatility and interval
forecasting.
"""

from .backtest import (
    BacktestConfig,
    EvaluationReport,
    MsisBacktestResult,
    expanding_backtest,
    msis_backtest,
    write_murphy_csv,
    write_report,
)
from .dgp import (
    SvSkewConfig,
    implied_marginal,
    simulate_sv_skew,
    true_conditional_predictive,
    true_conditional_quantile,
)
from .distributions import (
    EmpiricalCdf,
    Gaussian,
    GaussianMixture,
    LocScale,
    Mixture,
    StdSkewNormal,
    empirical_cdf,
    std_skew_normal,
)
from .evaluation import (
    ChristoffersenResult,
    ExceedanceRecord,
    MurphyGrid,
    block_bootstrap_ci,
    christoffersen_test,
    es_consistent_score,
    es_posterior_distribution,
    mean_predictive,
    mean_predictive_es,
    mean_predictive_quantile,
    murphy_diagram,
    var_exceedance,
)
from .models import (
    Arch1Class,
    ArchParams,
    EtsClass,
    EtsSpec,
    Garch11Class,
    GarchParams,
    LinearPoolClass,
    MixtureWeight,
    SkewArch1Class,
    SkewArchParams,
    arch1_predictive,
    ets_predictive,
    ets_select_and_fit,
    fit_mle,
    garch11_filter,
    garch11_predictive,
    gaussian_es,
    mixture_predictive,
    model_class,
    skew_arch1_predictive,
)
from .posterior import (
    ChainSettings,
    PosteriorDraws,
    ScaleFactor,
    calibrate_w_crps,
    calibrate_w_msis,
    grid_posterior_mixture,
    msis_scale_factor,
    log_posterior_kernel,
    optimize_score,
    sample_arch,
    sample_ets,
    sample_garch,
    sample_posterior,
)
from .scoring import (
    CensorRegion,
    CensoredScoreRule,
    CrpsRule,
    IntervalLevel,
    LogScoreRule,
    MsisRule,
    censored_score,
    crps,
    log_score,
    make_criterion,
    msis_competition,
    msis_update_score,
    parse_rule,
    score_sum,
    threshold_from_empirical_quantile,
)
from .utils import (
    CalibrationError,
    ConvergenceError,
    DegenerateScaleError,
    InvalidInputError,
    NumericalError,
    SamplerError,
    derive_rng,
    derive_seed,
)

__version__ = "0.1.0"
