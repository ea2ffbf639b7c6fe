"""American put pricing via iterative, constant-memory Monte Carlo.

The parallel engine accumulates per-block normal equations across path
iterations instead of storing paths, with a Longstaff-Schwartz baseline
and PDE/closed-form references for validation.
"""
from .diagnostics import (
    ConvergenceStudy,
    RateEstimate,
    StudyCell,
    estimate_rate,
    run_convergence_study,
)
from .errors import (
    ConfigError,
    DegenerateRegressionError,
    NumericalError,
    PsorConvergenceError,
)
from .lsm import LsmConfig, price_lsm
from .market import ExerciseSchedule, MarketParams, PathGrid, RngStream, simulate_path
from .oracle import (
    FdGrid,
    FdSolution,
    american_put_fd,
    american_put_fd_bermudan,
    european_put_closed_form,
)
from .parallel import (
    BOOTSTRAP_EUROPEAN,
    BoundaryEstimate,
    IterationPlan,
    PriceAccumulator,
    WeightScheme,
    boundary_weight,
    decide_and_value_path,
    price_parallel,
    run_iteration,
    solve_boundary,
    weight_price,
    weight_uv_step,
)
from .payoff import Payoff, PutPayoff
from .regression import (
    BasisSpec,
    CoefficientSet,
    NormalEquations,
    basis_eval,
    load_warm_start,
    merge,
    save_warm_start,
)
from .results import IterationTraceRow, PricingResult

__version__ = "0.1.0"

__all__ = [
    "BOOTSTRAP_EUROPEAN",
    "BasisSpec",
    "BoundaryEstimate",
    "CoefficientSet",
    "ConfigError",
    "ConvergenceStudy",
    "DegenerateRegressionError",
    "ExerciseSchedule",
    "FdGrid",
    "FdSolution",
    "IterationPlan",
    "IterationTraceRow",
    "LsmConfig",
    "MarketParams",
    "NormalEquations",
    "NumericalError",
    "Payoff",
    "PathGrid",
    "PriceAccumulator",
    "PricingResult",
    "PsorConvergenceError",
    "PutPayoff",
    "RateEstimate",
    "RngStream",
    "StudyCell",
    "WeightScheme",
    "american_put_fd",
    "american_put_fd_bermudan",
    "basis_eval",
    "boundary_weight",
    "decide_and_value_path",
    "estimate_rate",
    "european_put_closed_form",
    "load_warm_start",
    "merge",
    "price_lsm",
    "price_parallel",
    "run_convergence_study",
    "run_iteration",
    "save_warm_start",
    "simulate_path",
    "solve_boundary",
    "weight_price",
    "weight_uv_step",
    "__version__",
]
