"""Reference prices independent of the Monte Carlo machinery.

Closed-form European puts and a fully implicit finite-difference solver
for the American/Bermudan put.  The FD scheme marches backward from the
payoff on a uniform spot grid, solving one tridiagonal system per time
step and enforcing the exercise constraint either by pointwise
projection (default) or projected SOR.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import ConfigError, PsorConvergenceError
from .market import ExerciseSchedule, MarketParams
from .payoff import PutPayoff


def _norm_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def european_put_closed_form(params: MarketParams, payoff: PutPayoff, maturity: float) -> float:
    """Black-Scholes European put value at t = 0."""
    if maturity < 0.0:
        raise ConfigError(f"maturity must be non-negative, got {maturity}")
    s, r, sigma, k = params.spot, params.rate, params.vol, payoff.strike
    if maturity == 0.0:
        return payoff.exercise_value(s)
    if sigma == 0.0:
        return max(k * math.exp(-r * maturity) - s, 0.0)
    vol_sqrt_t = sigma * math.sqrt(maturity)
    d1 = (math.log(s / k) + (r + 0.5 * sigma * sigma) * maturity) / vol_sqrt_t
    d2 = d1 - vol_sqrt_t
    return k * math.exp(-r * maturity) * _norm_cdf(-d2) - s * _norm_cdf(-d1)


@dataclass(frozen=True)
class FdGrid:
    """Discretisation of the implicit solver.

    s_max and psor_tol default to 4 * strike and 1e-8 * strike when left
    unset; they are resolved against the payoff at solve time.
    """

    n_time: int = 40_000
    n_space: int = 1_000
    s_max: float | None = None
    method: str = "projection"
    psor_omega: float = 1.2
    psor_tol: float | None = None
    psor_max_iter: int = 2_000

    def __post_init__(self) -> None:
        if self.n_time < 1:
            raise ConfigError(f"n_time must be >= 1, got {self.n_time}")
        if self.n_space < 3:
            raise ConfigError(f"n_space must be >= 3, got {self.n_space}")
        if self.s_max is not None and not (self.s_max > 0.0 and math.isfinite(self.s_max)):
            raise ConfigError(f"s_max must be positive and finite, got {self.s_max}")
        if self.method not in ("projection", "psor"):
            raise ConfigError(f"fd method must be 'projection' or 'psor', got {self.method!r}")
        if not (0.0 < self.psor_omega < 2.0):
            raise ConfigError(f"psor_omega must be in (0, 2), got {self.psor_omega}")
        if self.psor_max_iter < 1:
            raise ConfigError(f"psor_max_iter must be >= 1, got {self.psor_max_iter}")


@dataclass(frozen=True)
class FdSolution:
    """Value function at t = 0 plus the exercise boundary in calendar time."""

    price: float
    spots: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    boundary_times: np.ndarray = field(repr=False)
    boundary: np.ndarray = field(repr=False)

    def boundary_at(self, t: float) -> float:
        """Boundary at the constrained time step nearest to t."""
        finite = np.nonzero(np.isfinite(self.boundary))[0]
        if finite.size == 0:
            raise ConfigError("solution has no constrained time steps")
        idx = finite[np.argmin(np.abs(self.boundary_times[finite] - t))]
        return float(self.boundary[idx])


def _run_fd(
    params: MarketParams,
    payoff: PutPayoff,
    maturity: float,
    grid: FdGrid,
    exercise_mask: np.ndarray,
) -> FdSolution:
    s_max = grid.s_max if grid.s_max is not None else 4.0 * payoff.strike
    if s_max <= payoff.strike or s_max <= params.spot:
        raise ConfigError(f"s_max={s_max} must exceed both strike and spot")
    method = kernels.FD_PSOR if grid.method == "psor" else kernels.FD_PROJECTION
    if method == kernels.FD_PSOR and kernels.BACKEND != "numba":
        raise ConfigError("fd method 'psor' requires the numba kernel backend")
    psor_tol = grid.psor_tol if grid.psor_tol is not None else 1e-8 * payoff.strike
    values, boundary, status = kernels.fd_put(
        payoff.strike,
        params.rate,
        params.vol,
        maturity,
        grid.n_time,
        grid.n_space,
        s_max,
        exercise_mask,
        method,
        grid.psor_omega,
        psor_tol,
        grid.psor_max_iter,
    )
    if status != 0:
        step = int(status) - 1
        raise PsorConvergenceError(
            f"projected SOR failed to converge at time step {step}", step=step
        )
    spots = np.linspace(0.0, s_max, grid.n_space + 1)
    times = np.linspace(0.0, maturity, grid.n_time + 1)
    price = float(np.interp(params.spot, spots, values))
    return FdSolution(price, spots, values, times, boundary)


def american_put_fd(
    params: MarketParams, payoff: PutPayoff, maturity: float, grid: FdGrid = FdGrid()
) -> FdSolution:
    """American put: exercise constraint enforced at every time step."""
    if not (maturity > 0.0 and math.isfinite(maturity)):
        raise ConfigError(f"maturity must be positive and finite, got {maturity}")
    mask = np.ones(grid.n_time + 1, dtype=np.uint8)
    return _run_fd(params, payoff, maturity, grid, mask)


def american_put_fd_bermudan(
    params: MarketParams,
    payoff: PutPayoff,
    schedule: ExerciseSchedule,
    grid: FdGrid = FdGrid(),
) -> FdSolution:
    """Same scheme with the constraint applied only on the schedule dates.

    Every schedule date must sit on the time grid.
    """
    maturity = schedule.maturity
    dt = maturity / grid.n_time
    mask = np.zeros(grid.n_time + 1, dtype=np.uint8)
    for t in schedule.times:
        step = int(round(t / dt))
        if step < 0 or step > grid.n_time or abs(step * dt - t) > 1e-9 * max(1.0, maturity):
            raise ConfigError(f"schedule date {t} is not representable on the fd time grid")
        mask[step] = 1
    return _run_fd(params, payoff, maturity, grid, mask)
