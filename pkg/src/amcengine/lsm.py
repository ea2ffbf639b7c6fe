"""Least-squares Monte Carlo baseline with stored paths.

Classic backward recursion: simulate and keep all paths, at each date
regress the one-step discounted continuation on {1, S, S^2} over the
in-the-money paths, exercise where intrinsic meets or beats the fitted
continuation, and average the resulting date-1 values.  The recursion
carries the simulated discounted payoff, never the fitted value, so the
regression only decides, it does not bias the cash flows.

The pricing phase is single-threaded by design; only path generation
can optionally be spread over workers.
"""
from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import ConfigError, DegenerateRegressionError
from .market import ExerciseSchedule, MarketParams, discount
from .payoff import PutPayoff
from .regression import DEFAULT_RIDGE, solve_spd_system
from .results import PricingResult


@dataclass(frozen=True)
class LsmConfig:
    """Paths, seed, and regression knobs for the baseline engine."""

    n_paths: int
    seed: int = 0
    ridge: float = DEFAULT_RIDGE
    parallel_paths: bool = False
    workers: int = 1
    keep_coefficients: bool = False

    def __post_init__(self) -> None:
        if self.n_paths < 3:
            raise ConfigError(f"n_paths must be >= 3 for a 3-function regression, got {self.n_paths}")
        if self.seed < 0:
            raise ConfigError(f"seed must be non-negative, got {self.seed}")
        if self.ridge < 0.0:
            raise ConfigError(f"ridge must be non-negative, got {self.ridge}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")


@dataclass(frozen=True)
class PathValuation:
    """Backward-pass output for one path.

    p1 is the optimal payoff discounted to the first exercise date;
    ptilde[k] is the one-step discounted continuation at date k for
    k = 0..M-2; exercise_index is the realised stopping date (maturity
    when no earlier exercise triggers).
    """

    p1: float
    exercise_index: int
    ptilde: np.ndarray = field(repr=False)


def _simulate_matrix(
    params: MarketParams, schedule: ExerciseSchedule, config: LsmConfig
) -> np.ndarray:
    dt = schedule.step_sizes()
    n = config.n_paths
    if not config.parallel_paths or config.workers == 1:
        return kernels.simulate_paths(config.seed, 0, n, params.spot, params.rate, params.vol, dt)
    out = np.empty((n, schedule.n_dates), dtype=np.float64)
    base = n // config.workers
    ranges = []
    for w in range(config.workers):
        lo = w * base
        hi = n if w == config.workers - 1 else lo + base
        if hi > lo:
            ranges.append((lo, hi))

    def fill(span: tuple[int, int]) -> None:
        lo, hi = span
        out[lo:hi] = kernels.simulate_paths(
            config.seed, lo, hi, params.spot, params.rate, params.vol, dt
        )

    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        list(pool.map(fill, ranges))
    return out


def price_lsm(
    params: MarketParams,
    payoff: PutPayoff,
    schedule: ExerciseSchedule,
    config: LsmConfig,
) -> PricingResult:
    """Price by the stored-path backward recursion; returns t = 0 values."""
    t_start = time.perf_counter()
    times = schedule.times_array()
    n_dates = schedule.n_dates
    x = _simulate_matrix(params, schedule, config)
    t_sim = time.perf_counter()

    fpay = payoff.exercise_value(x)
    value = fpay[:, n_dates - 1].copy()
    alphas: list[np.ndarray | None] = [None] * max(n_dates - 1, 0)
    for k in range(n_dates - 2, -1, -1):
        df = discount(params.rate, times[k], times[k + 1])
        cont = df * value
        itm = payoff.in_the_money(x[:, k])
        if not np.any(itm):
            value = cont
            continue
        xk = x[itm, k]
        design = np.empty((xk.shape[0], 3), dtype=np.float64)
        design[:, 0] = 1.0
        design[:, 1] = xk
        design[:, 2] = xk * xk
        u = design.T @ design
        v = design.T @ cont[itm]
        try:
            alpha = solve_spd_system(u, v, config.ridge, f"date {k}")
        except DegenerateRegressionError as exc:
            raise DegenerateRegressionError(str(exc), block=k) from exc
        alphas[k] = alpha
        fitted = design @ alpha
        exercise = fpay[itm, k] >= fitted
        new_value = cont.copy()
        itm_idx = np.nonzero(itm)[0]
        new_value[itm_idx[exercise]] = fpay[itm_idx[exercise], k]
        value = new_value

    d0 = discount(params.rate, 0.0, times[0])
    p0 = d0 * value
    price = float(p0.mean())
    se = float(p0.std(ddof=1) / math.sqrt(config.n_paths)) if config.n_paths > 1 else 0.0
    t_end = time.perf_counter()

    result = PricingResult(
        engine="lsm",
        price=price,
        standard_error=se,
        n_paths=config.n_paths,
        wall_ms={
            "simulate": 1e3 * (t_sim - t_start),
            "recursion": 1e3 * (t_end - t_sim),
            "total": 1e3 * (t_end - t_start),
        },
        config={
            "spot": params.spot,
            "rate": params.rate,
            "vol": params.vol,
            "strike": payoff.strike,
            "maturity": schedule.maturity,
            "n_dates": n_dates,
            "paths": config.n_paths,
            "seed": config.seed,
            "ridge": config.ridge,
        },
    )
    if config.keep_coefficients:
        result.coefficients = [
            None if a is None else [float(c) for c in a] for a in alphas
        ]
    return result
