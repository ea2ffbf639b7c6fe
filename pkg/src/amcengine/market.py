"""Single-asset lognormal market model and exercise schedule.

Paths are stepped exactly between exercise dates,

    X_k = X_{k-1} * exp((r - sigma^2/2) dt_k + sigma sqrt(dt_k) Z_k),

so there is no time-discretisation bias; the only discretisation is the
exercise schedule itself.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class MarketParams:
    """Spot, short rate, and lognormal volatility of the single asset."""

    spot: float
    rate: float
    vol: float

    def __post_init__(self) -> None:
        if not (self.spot > 0.0 and math.isfinite(self.spot)):
            raise ConfigError(f"spot must be positive and finite, got {self.spot}")
        if not math.isfinite(self.rate):
            raise ConfigError(f"rate must be finite, got {self.rate}")
        if not (self.vol >= 0.0 and math.isfinite(self.vol)):
            raise ConfigError(f"vol must be non-negative and finite, got {self.vol}")


@dataclass(frozen=True)
class ExerciseSchedule:
    """Strictly increasing exercise dates t_1 < ... < t_M with t_M = maturity.

    t_0 = 0 is the valuation date and is not an exercise date.
    """

    times: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.times) == 0:
            raise ConfigError("schedule needs at least one exercise date")
        prev = 0.0
        for t in self.times:
            if not (t > prev and math.isfinite(t)):
                raise ConfigError(f"schedule dates must be strictly increasing and positive, got {self.times}")
            prev = t

    @classmethod
    def from_dates_per_year(cls, maturity: float, dates_per_year: int = 50) -> "ExerciseSchedule":
        """Uniform grid t_k = k * T / M with M = dates_per_year * T dates."""
        if not (maturity > 0.0 and math.isfinite(maturity)):
            raise ConfigError(f"maturity must be positive and finite, got {maturity}")
        if dates_per_year < 1:
            raise ConfigError(f"dates_per_year must be >= 1, got {dates_per_year}")
        m_exact = dates_per_year * maturity
        m = int(round(m_exact))
        if m < 1 or abs(m_exact - m) > 1e-9:
            raise ConfigError(
                f"dates_per_year * maturity must be a whole number of dates, got {m_exact}"
            )
        return cls(tuple((k * maturity) / m for k in range(1, m + 1)))

    @property
    def n_dates(self) -> int:
        return len(self.times)

    @property
    def maturity(self) -> float:
        return self.times[-1]

    def times_array(self) -> np.ndarray:
        return np.asarray(self.times, dtype=np.float64)

    def step_sizes(self) -> np.ndarray:
        """dt_k = t_k - t_{k-1} with t_0 = 0; all positive."""
        t = self.times_array()
        out = np.empty_like(t)
        out[0] = t[0]
        out[1:] = t[1:] - t[:-1]
        return out


@dataclass(frozen=True)
class RngStream:
    """Addresses the random numbers of one path: (master_seed, path_index)."""

    master_seed: int
    path_index: int

    def __post_init__(self) -> None:
        if self.master_seed < 0 or self.path_index < 0:
            raise ConfigError("master_seed and path_index must be non-negative")


@dataclass(frozen=True)
class PathGrid:
    """One simulated path: values X_1..X_M on the exercise dates."""

    path_index: int
    values: np.ndarray


def discount(rate: float, t1: float, t2: float) -> float:
    """Deterministic discount factor exp(-rate * (t2 - t1)) for t2 >= t1."""
    if t2 < t1:
        raise ConfigError(f"discount requires t2 >= t1, got t1={t1}, t2={t2}")
    return math.exp(-rate * (t2 - t1))


def simulate_path(params: MarketParams, schedule: ExerciseSchedule, stream: RngStream) -> PathGrid:
    """Exact lognormal path of one stream on the schedule dates."""
    from . import kernels

    values = kernels.simulate_paths(
        stream.master_seed,
        stream.path_index,
        stream.path_index + 1,
        params.spot,
        params.rate,
        params.vol,
        schedule.step_sizes(),
    )[0]
    return PathGrid(stream.path_index, values)
