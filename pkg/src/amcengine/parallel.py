"""Iterative parallel pricing engine without path storage.

Paths are consumed in n fixed-size iterations.  Iteration i values its
paths with the coefficients solved after iteration i-1, then folds its
weighted normal-equation contributions into the running sums:

    U <- w_uv(i) * U + u_i,   V <- w_uv(i) * V + v_i,

so older iterations, priced under cruder policies, decay geometrically.
Prices accumulate with their own schedule w(i) that suppresses the early
iterations; the final estimate is the weighted mean of the per-path
date-1 values, discounted to t = 0.  Within an iteration, workers own
disjoint path ranges and private partial sums that the coordinator
merges in worker order, so results do not depend on the worker count
beyond float summation order.

Memory is O(basis^2 * blocks + batch); nothing grows with the total
path count.
"""
from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import ConfigError, DegenerateRegressionError
from .lsm import PathValuation
from .market import ExerciseSchedule, MarketParams, PathGrid, discount
from .payoff import PutPayoff
from .regression import (
    DEFAULT_RIDGE,
    BasisSpec,
    CoefficientSet,
    NormalEquations,
)
from .results import IterationTraceRow, PricingResult

BOOTSTRAP_EUROPEAN = "european"


@dataclass(frozen=True)
class IterationPlan:
    """Total paths split into n iterations of m = n_paths / n_iterations."""

    n_paths: int
    n_iterations: int

    def __post_init__(self) -> None:
        if self.n_iterations < 1:
            raise ConfigError(f"n_iterations must be >= 1, got {self.n_iterations}")
        if self.n_paths < self.n_iterations:
            raise ConfigError(
                f"n_paths ({self.n_paths}) must be >= n_iterations ({self.n_iterations})"
            )
        if self.n_paths % self.n_iterations != 0:
            raise ConfigError(
                f"n_paths ({self.n_paths}) must be divisible by n_iterations ({self.n_iterations})"
            )

    @property
    def paths_per_iteration(self) -> int:
        return self.n_paths // self.n_iterations

    def path_range(self, iteration: int) -> tuple[int, int]:
        """Global path indices [lo, hi) of 1-based iteration i."""
        if not (1 <= iteration <= self.n_iterations):
            raise ConfigError(f"iteration {iteration} outside [1, {self.n_iterations}]")
        m = self.paths_per_iteration
        return (iteration - 1) * m, iteration * m


@dataclass(frozen=True)
class WeightScheme:
    """Decay and localisation weights of the iterative engine.

    lam/mu set the normal-equation decay 1 - lam * exp(-i / mu); nu sets
    the price weight 1 - (1 - tanh(nu * (i - 1))) / 2.  beta is the
    width of the Gaussian boundary weight in price units (None resolves
    to 0.2 * strike at run time) and beta_shrink optionally tightens it
    every iteration.  Boundary weighting starts at iteration 2; the
    first iteration always weights by the in-the-money indicator.
    """

    lam: float = 2.0
    mu: float = 2.0
    nu: float = 0.99
    beta: float | None = None
    beta_shrink: float = 1.0
    boundary_weights: bool = True

    def __post_init__(self) -> None:
        for name in ("lam", "mu", "nu", "beta_shrink"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ConfigError(f"{name} must be finite, got {value}")
        if self.lam < 0.0:
            raise ConfigError(f"lam must be non-negative, got {self.lam}")
        if self.mu <= 0.0:
            raise ConfigError(f"mu must be positive, got {self.mu}")
        if self.nu < 0.0:
            raise ConfigError(f"nu must be non-negative, got {self.nu}")
        if self.beta is not None and not (self.beta > 0.0 and math.isfinite(self.beta)):
            raise ConfigError(f"beta must be positive and finite, got {self.beta}")
        if not (0.0 < self.beta_shrink <= 1.0):
            raise ConfigError(f"beta_shrink must be in (0, 1], got {self.beta_shrink}")

    def validate_for_iterations(self, n_iterations: int) -> None:
        """Every decay factor actually applied (i = 2..n) must be >= 0."""
        if n_iterations >= 2:
            first = weight_uv_step(2, self.lam, self.mu)
            if first < 0.0:
                raise ConfigError(
                    f"lam={self.lam}, mu={self.mu} give a negative decay factor "
                    f"{first:.6f} at iteration 2; require lam <= exp(2/mu)"
                )

    def resolve_beta(self, strike: float) -> float:
        return self.beta if self.beta is not None else 0.2 * strike

    def beta_at(self, iteration: int, strike: float) -> float:
        """Gaussian width used by iteration i >= 2."""
        return self.resolve_beta(strike) * self.beta_shrink ** max(iteration - 2, 0)


def weight_uv_step(iteration: int, lam: float, mu: float) -> float:
    """Rescaling applied to the accumulated U, V at the start of iteration i."""
    return 1.0 - lam * math.exp(-iteration / mu)


def weight_price(iteration: int, nu: float) -> float:
    """Weight of iteration i's price contribution, in (0, 1]."""
    return 1.0 - 0.5 * (1.0 - math.tanh(nu * (iteration - 1)))


def boundary_weight(spot: float, boundary: float, beta: float) -> float:
    """Gaussian localisation around the exercise boundary."""
    d = spot - boundary
    return math.exp(-(d * d) / (2.0 * beta * beta))


def solve_boundary(
    coeffs: CoefficientSet,
    payoff: PutPayoff,
    date_index: int,
    time_value: float,
    abs_tol: float | None = None,
) -> float | None:
    """Exercise boundary at one date: root of intrinsic minus continuation.

    Bisects g(x) = (K - x) - C_hat(x) on (0, K].  Returns K when the
    fitted continuation never beats intrinsic below the strike, and None
    when there is no sign change (no admissible boundary; callers fall
    back to indicator weighting).
    """
    strike = payoff.strike
    block = coeffs.spec.block_of(date_index)
    if coeffs.alphas[block] is None:
        return None
    tol = abs_tol if abs_tol is not None else 1e-6 * strike

    def g(x: float) -> float:
        return (strike - x) - coeffs.continuation_value(x, time_value, date_index)

    if g(strike) >= 0.0:
        return strike
    # The quadratic is only trusted near its data; extrapolated toward 0 it
    # can cross again.  Take the crossing closest to the strike: scan down
    # until g flips sign, then bisect inside that one sub-interval.
    scan = 400
    hi = strike
    lo = None
    for j in range(1, scan + 1):
        x = strike * (1.0 - j / scan)
        if g(x) >= 0.0:
            lo = x
            break
        hi = x
    if lo is None:
        return None
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if g(mid) >= 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class BoundaryEstimate:
    """Boundary at one exercise date; value is None when no root exists."""

    date_index: int
    time: float
    value: float | None


@dataclass
class PriceAccumulator:
    """Weighted running sums behind the price and its standard error.

    Tracks q = sum w_i m_i, q2 = sum w_i^2 m_i, the weighted sum of the
    per-path date-1 values, and the weighted sum of their squares.
    """

    weighted_sum: float = 0.0
    weighted_sq_sum: float = 0.0
    q: float = 0.0
    q2: float = 0.0

    def add(self, weight: float, n_paths: int, p1_sum: float, p1_sq_sum: float) -> None:
        if weight < 0.0:
            raise ConfigError(f"price weight must be non-negative, got {weight}")
        self.weighted_sum += weight * p1_sum
        self.weighted_sq_sum += weight * p1_sq_sum
        self.q += weight * n_paths
        self.q2 += weight * weight * n_paths

    def price(self, discount0: float = 1.0) -> float:
        if self.q <= 0.0:
            raise ConfigError("no price contributions accumulated")
        return discount0 * self.weighted_sum / self.q

    def variance(self, discount0: float = 1.0) -> float:
        p = self.price(discount0)
        raw = discount0 * discount0 * self.weighted_sq_sum / self.q - p * p
        return max(raw, 0.0)

    def standard_error(self, discount0: float = 1.0) -> float:
        return math.sqrt(self.variance(discount0) * self.q2) / self.q


def decide_and_value_path(
    grid: PathGrid,
    schedule: ExerciseSchedule,
    payoff: PutPayoff,
    rate: float,
    policy: CoefficientSet | str,
) -> PathValuation:
    """Backward pass over one path under a fixed policy.

    The policy is either a CoefficientSet or the European bootstrap
    (exercise only at maturity).  Exercise at date k requires the path
    to be in the money with intrinsic value at or above the fitted
    continuation; ties exercise.
    """
    if isinstance(policy, str) and policy != BOOTSTRAP_EUROPEAN:
        raise ConfigError(f"unknown bootstrap policy {policy!r}")
    times = schedule.times_array()
    x = grid.values
    n_dates = times.shape[0]
    if x.shape[0] != n_dates:
        raise ConfigError(f"path has {x.shape[0]} values, schedule has {n_dates} dates")
    value = float(payoff.exercise_value(float(x[-1])))
    exercise_index = n_dates - 1
    ptilde = np.empty(max(n_dates - 1, 0), dtype=np.float64)
    for k in range(n_dates - 2, -1, -1):
        cont = discount(rate, times[k], times[k + 1]) * value
        ptilde[k] = cont
        value = cont
        if isinstance(policy, CoefficientSet):
            block = policy.spec.block_of(k)
            if policy.alphas[block] is not None and payoff.in_the_money(float(x[k])):
                intrinsic = float(payoff.exercise_value(float(x[k])))
                if intrinsic >= policy.continuation_value(float(x[k]), float(times[k]), k):
                    value = intrinsic
                    exercise_index = k
    return PathValuation(p1=value, exercise_index=exercise_index, ptilde=ptilde)


@dataclass
class IterationResult:
    """Merged kernel partials of one iteration."""

    u: np.ndarray = field(repr=False)
    v: np.ndarray = field(repr=False)
    mass: np.ndarray = field(repr=False)
    p1_sum: float
    p1_sq_sum: float
    n_paths: int
    boundaries: np.ndarray = field(repr=False)
    wall_ms: float


def _worker_ranges(lo: int, hi: int, workers: int) -> list[tuple[int, int]]:
    """m // W paths per worker, remainder to the last."""
    total = hi - lo
    base = total // workers
    ranges = []
    for w in range(workers):
        a = lo + w * base
        b = hi if w == workers - 1 else a + base
        if b > a:
            ranges.append((a, b))
    return ranges


def run_iteration(
    iteration: int,
    policy: CoefficientSet | str,
    params: MarketParams,
    payoff: PutPayoff,
    schedule: ExerciseSchedule,
    plan: IterationPlan,
    weights: WeightScheme,
    basis: BasisSpec,
    seed: int,
    workers: int = 1,
    max_batch: int = 8192,
    pool: ThreadPoolExecutor | None = None,
) -> IterationResult:
    """Value one iteration's paths under the given policy and accumulate."""
    t0 = time.perf_counter()
    times = schedule.times_array()
    dt = schedule.step_sizes()
    n_dates = schedule.n_dates

    w_boundary = np.full(n_dates, np.nan)
    w_beta = np.full(n_dates, np.nan)
    use_gaussian = (
        weights.boundary_weights
        and iteration >= 2
        and isinstance(policy, CoefficientSet)
        and not policy.bootstrap
    )
    if use_gaussian:
        beta_i = weights.beta_at(iteration, payoff.strike)
        for k in range(n_dates - 1):
            b = solve_boundary(policy, payoff, k, float(times[k]))
            if b is not None:
                w_boundary[k] = b
                w_beta[k] = beta_i

    if isinstance(policy, CoefficientSet):
        mode = kernels.MODE_COEFFS
        coef, coef_ok = policy.packed()
    else:
        if policy != BOOTSTRAP_EUROPEAN:
            raise ConfigError(f"unknown bootstrap policy {policy!r}")
        mode = kernels.MODE_EUROPEAN
        coef = np.zeros((basis.n_blocks, basis.n_functions), dtype=np.float64)
        coef_ok = np.zeros(basis.n_blocks, dtype=np.uint8)

    lo, hi = plan.path_range(iteration)
    block_of = basis.block_of_dates()

    def work(span: tuple[int, int]):
        return kernels.iteration_pass(
            seed,
            span[0],
            span[1],
            params.spot,
            params.rate,
            params.vol,
            payoff.strike,
            dt,
            times,
            mode,
            coef,
            coef_ok,
            block_of,
            1 if basis.include_time else 0,
            w_boundary,
            w_beta,
            max_batch,
        )

    ranges = _worker_ranges(lo, hi, workers)
    if workers == 1 or len(ranges) == 1:
        partials = [work(ranges[0])]
    elif pool is not None:
        partials = list(pool.map(work, ranges))
    else:
        with ThreadPoolExecutor(max_workers=workers) as own_pool:
            partials = list(own_pool.map(work, ranges))

    u, v, mass, p1_sum, p1_sq_sum = partials[0]
    u = u.copy()
    v = v.copy()
    mass = mass.copy()
    for pu, pv, pm, ps, pq in partials[1:]:
        u += pu
        v += pv
        mass += pm
        p1_sum += ps
        p1_sq_sum += pq

    return IterationResult(
        u=u,
        v=v,
        mass=mass,
        p1_sum=p1_sum,
        p1_sq_sum=p1_sq_sum,
        n_paths=hi - lo,
        boundaries=w_boundary,
        wall_ms=1e3 * (time.perf_counter() - t0),
    )


def price_parallel(
    params: MarketParams,
    payoff: PutPayoff,
    schedule: ExerciseSchedule,
    plan: IterationPlan,
    weights: WeightScheme = WeightScheme(),
    basis: BasisSpec | None = None,
    *,
    seed: int = 0,
    bootstrap: CoefficientSet | str = BOOTSTRAP_EUROPEAN,
    workers: int = 1,
    max_batch: int = 8192,
    ridge: float = DEFAULT_RIDGE,
    keep_trace: bool = True,
) -> PricingResult:
    """Price by iterative accumulation; memory independent of total paths."""
    t_start = time.perf_counter()
    if workers < 1:
        raise ConfigError(f"workers must be >= 1, got {workers}")
    if max_batch < 1:
        raise ConfigError(f"max_batch must be >= 1, got {max_batch}")
    if seed < 0:
        raise ConfigError(f"seed must be non-negative, got {seed}")
    if basis is None:
        basis = BasisSpec.blocked(schedule.n_dates, min(10, schedule.n_dates))
    if basis.n_dates != schedule.n_dates:
        raise ConfigError(
            f"basis covers {basis.n_dates} dates, schedule has {schedule.n_dates}"
        )
    weights.validate_for_iterations(plan.n_iterations)
    if isinstance(bootstrap, CoefficientSet):
        if bootstrap.spec.fingerprint != basis.fingerprint:
            raise ConfigError(
                f"warm-start basis {bootstrap.spec.fingerprint!r} does not match "
                f"the run's basis {basis.fingerprint!r}"
            )
    elif bootstrap != BOOTSTRAP_EUROPEAN:
        raise ConfigError(f"unknown bootstrap policy {bootstrap!r}")

    times = schedule.times_array()
    n_dates = schedule.n_dates
    mid_date = max((n_dates - 2) // 2, 0)
    d0 = discount(params.rate, 0.0, float(times[0]))

    ne = NormalEquations(basis)
    accumulator = PriceAccumulator()
    policy: CoefficientSet | str = bootstrap
    trace: list[IterationTraceRow] = []
    solve_ms = 0.0
    iter_ms = 0.0

    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for i in range(1, plan.n_iterations + 1):
            it = run_iteration(
                i,
                policy,
                params,
                payoff,
                schedule,
                plan,
                weights,
                basis,
                seed,
                workers=workers,
                max_batch=max_batch,
                pool=pool,
            )
            iter_ms += it.wall_ms

            t_solve = time.perf_counter()
            if i >= 2:
                ne.scale(weight_uv_step(i, weights.lam, weights.mu))
            ne.add_raw(it.u, it.v, it.mass)
            coeffs = ne.solve(ridge)
            if coeffs.bootstrap and n_dates > 1:
                raise DegenerateRegressionError(
                    f"no regression block accumulated weight by iteration {i}"
                )
            policy = coeffs
            accumulator.add(weight_price(i, weights.nu), it.n_paths, it.p1_sum, it.p1_sq_sum)
            solve_ms += 1e3 * (time.perf_counter() - t_solve)

            if keep_trace:
                b_mid = solve_boundary(coeffs, payoff, mid_date, float(times[mid_date]))
                trace.append(
                    IterationTraceRow(
                        iteration=i,
                        running_price=accumulator.price(d0),
                        running_se=accumulator.standard_error(d0),
                        boundary_mid=b_mid if b_mid is not None else math.nan,
                        wall_ms=it.wall_ms,
                    )
                )
    finally:
        if pool is not None:
            pool.shutdown(wait=False)

    final_coeffs: CoefficientSet = policy  # type: ignore[assignment]
    boundary_rows: list[tuple[float, float]] = []
    for k in range(n_dates - 1):
        b = solve_boundary(final_coeffs, payoff, k, float(times[k]))
        boundary_rows.append((float(times[k]), b if b is not None else math.nan))

    t_end = time.perf_counter()
    return PricingResult(
        engine="parallel",
        price=accumulator.price(d0),
        standard_error=accumulator.standard_error(d0),
        n_paths=plan.n_paths,
        wall_ms={
            "iterations": iter_ms,
            "solve": solve_ms,
            "total": 1e3 * (t_end - t_start),
        },
        config={
            "spot": params.spot,
            "rate": params.rate,
            "vol": params.vol,
            "strike": payoff.strike,
            "maturity": schedule.maturity,
            "n_dates": n_dates,
            "paths": plan.n_paths,
            "iterations": plan.n_iterations,
            "group_size": basis.group_size,
            "lam": weights.lam,
            "mu": weights.mu,
            "nu": weights.nu,
            "beta": weights.resolve_beta(payoff.strike),
            "beta_shrink": weights.beta_shrink,
            "boundary_weights": weights.boundary_weights,
            "seed": seed,
            "workers": workers,
            "ridge": ridge,
            "bootstrap": "warm" if isinstance(bootstrap, CoefficientSet) else bootstrap,
        },
        trace=trace if keep_trace else None,
        boundary=boundary_rows,
        coefficients=final_coeffs.to_json_dict(),
    )
