"""Advertising-response modeling toolkit.

An ODE market-share model (spend-driven adoption with word-of-mouth
amplification and decay), its closed-form pulse response and steady
states, surrogate-smoothed parameter estimation from noisy campaign
data, and a log-log benchmark model for side-by-side comparison.
"""
from .budgets import (ConstantBudget, PiecewiseConstantBudget, PulseTrain,
                      parse_budget_spec, random_walk_budget)
from .dataio import (CampaignRecord, CsvFormatError, NormalizationConfig,
                     NormalizationError, SyntheticSpec,
                     default_market_potential, generate_synthetic, load_csv,
                     normalize, write_csv)
from .econ import (ComparisonScenario, EconParams, RankDeficientError,
                   compare_models, fit_ols, predict_econ, steady_state_econ)
from .estimate import (DEFAULT_BOUNDS, EstimationError, EstimationProblem,
                       FIT_REPORT_SCHEMA, FitReport, StartOutcome, fit_gvw,
                       fit_gvw_fd, nls_solve, rate_residuals)
from .gvw import (GvwParams, NoRootInUnitInterval, NoSteadyState, PulseSpec,
                  QuadraticReduction, SteadyState, SweepCurve, classify_shape,
                  elasticity_threshold, pulse_response, quadratic_coefficients,
                  response_rate, sensitivity_sweep, simulate, steady_budget,
                  steady_share, steady_state, taylor_reduce, wom_approximation)
from .lm import LmResult, lm_minimize, marquardt_step
from .mlp import (MlpSpec, MlpWeights, forward, init_weights, jacobian,
                  time_derivative, widen_weights)
from .ode import IntegrationError, integrate
from .svg import line_chart
from .train import (SurrogateModel, TrainConfig, TrainingError, TrainReport,
                    lm_train)
from .trajectory import Trajectory

__version__ = "0.1.0"

__all__ = [
    "ConstantBudget", "PiecewiseConstantBudget", "PulseTrain",
    "parse_budget_spec", "random_walk_budget",
    "CampaignRecord", "CsvFormatError", "NormalizationConfig",
    "NormalizationError", "SyntheticSpec", "default_market_potential",
    "generate_synthetic", "load_csv", "normalize", "write_csv",
    "ComparisonScenario", "EconParams", "RankDeficientError",
    "compare_models", "fit_ols", "predict_econ", "steady_state_econ",
    "DEFAULT_BOUNDS", "EstimationError", "EstimationProblem",
    "FIT_REPORT_SCHEMA", "FitReport", "StartOutcome", "fit_gvw",
    "fit_gvw_fd", "nls_solve", "rate_residuals",
    "GvwParams", "NoRootInUnitInterval", "NoSteadyState", "PulseSpec",
    "QuadraticReduction", "SteadyState", "SweepCurve", "classify_shape",
    "elasticity_threshold", "pulse_response", "quadratic_coefficients",
    "response_rate", "sensitivity_sweep", "simulate", "steady_budget",
    "steady_share", "steady_state", "taylor_reduce", "wom_approximation",
    "LmResult", "lm_minimize", "marquardt_step",
    "MlpSpec", "MlpWeights", "forward", "init_weights", "jacobian",
    "time_derivative", "widen_weights",
    "IntegrationError", "integrate",
    "line_chart",
    "SurrogateModel", "TrainConfig", "TrainingError", "TrainReport",
    "lm_train",
    "Trajectory",
    "__version__",
]
