"""Convergence studies over paths, iterations, or workers.

A study prices the same product at several points along one axis with
repeated independent seeds, so convergence plots and Monte Carlo rate
checks are plain data transforms of its cells.
"""
from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError
from .market import ExerciseSchedule, MarketParams
from .parallel import IterationPlan, WeightScheme, price_parallel
from .payoff import PutPayoff
from .regression import DEFAULT_RIDGE, BasisSpec
from .results import IterationTraceRow

AXES = ("paths", "iterations", "workers")


@dataclass(frozen=True)
class StudyCell:
    """One engine run: a (point, repeat) pair of the study."""

    axis_value: int
    repeat: int
    price: float
    se_internal: float
    wall_ms: float
    trace: tuple[IterationTraceRow, ...] | None = None

    def csv_row(self) -> list[str]:
        return [
            str(self.axis_value),
            str(self.repeat),
            repr(self.price),
            repr(self.se_internal),
            repr(self.wall_ms),
        ]


@dataclass(frozen=True)
class PointSummary:
    axis_value: int
    mean_price: float
    se_empirical: float
    se_internal_mean: float
    mean_wall_ms: float


@dataclass(frozen=True)
class ConvergenceStudy:
    """Axis, sample points, and repeats; cells hold the filled results."""

    axis: str
    points: tuple[int, ...]
    repeats: int
    cells: tuple[StudyCell, ...] = field(default=())

    def __post_init__(self) -> None:
        if self.axis not in AXES:
            raise ConfigError(f"axis must be one of {AXES}, got {self.axis!r}")
        if len(self.points) < 3:
            raise ConfigError(f"need at least 3 sample points, got {len(self.points)}")
        if len(set(self.points)) != len(self.points):
            raise ConfigError("sample points must be distinct")
        if any(p < 1 for p in self.points):
            raise ConfigError("sample points must be positive")
        if self.repeats < 1:
            raise ConfigError(f"repeats must be >= 1, got {self.repeats}")

    @property
    def filled(self) -> bool:
        return len(self.cells) == len(self.points) * self.repeats

    def point_summaries(self) -> list[PointSummary]:
        """Per-point aggregation; empirical s.e. needs >= 2 repeats."""
        if not self.filled:
            raise ConfigError("study not filled")
        out = []
        for p in self.points:
            prices = [c.price for c in self.cells if c.axis_value == p]
            ses = [c.se_internal for c in self.cells if c.axis_value == p]
            walls = [c.wall_ms for c in self.cells if c.axis_value == p]
            se_emp = (
                float(np.std(prices, ddof=1)) / math.sqrt(len(prices))
                if len(prices) > 1
                else math.nan
            )
            out.append(
                PointSummary(
                    axis_value=p,
                    mean_price=float(np.mean(prices)),
                    se_empirical=se_emp,
                    se_internal_mean=float(np.mean(ses)),
                    mean_wall_ms=float(np.mean(walls)),
                )
            )
        return out

    def se_agreement_factor(self, axis_value: int) -> float:
        """Across-repeat price std over the mean internal ε at one point.

        The internal estimator predicts the dispersion of one run, so the
        comparable empirical quantity is the raw std, not std/sqrt(R).
        """
        prices = [c.price for c in self.cells if c.axis_value == axis_value]
        ses = [c.se_internal for c in self.cells if c.axis_value == axis_value]
        if len(prices) < 2:
            raise ConfigError("agreement check needs repeats >= 2")
        std = float(np.std(prices, ddof=1))
        return std / float(np.mean(ses))

    def to_csv(self, path: str) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["axis_value", "repeat", "price", "se_internal", "wall_ms"])
            for cell in self.cells:
                writer.writerow(cell.csv_row())

    @classmethod
    def from_csv(cls, path: str, axis: str, points: tuple[int, ...], repeats: int) -> "ConvergenceStudy":
        cells = []
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            for row in reader:
                cells.append(
                    StudyCell(
                        axis_value=int(row["axis_value"]),
                        repeat=int(row["repeat"]),
                        price=float(row["price"]),
                        se_internal=float(row["se_internal"]),
                        wall_ms=float(row["wall_ms"]),
                    )
                )
        return cls(axis=axis, points=points, repeats=repeats, cells=tuple(cells))


@dataclass(frozen=True)
class RateEstimate:
    """Log-log slope of s.e. against the axis, with its own standard error."""

    slope: float
    slope_se: float
    n_points: int


def run_convergence_study(
    study: ConvergenceStudy,
    params: MarketParams,
    payoff: PutPayoff,
    schedule: ExerciseSchedule,
    *,
    n_paths: int = 100_000,
    n_iterations: int = 100,
    group_size: int = 10,
    weights: WeightScheme = WeightScheme(),
    seed: int = 0,
    workers: int = 1,
    max_batch: int = 8192,
    ridge: float = DEFAULT_RIDGE,
    keep_traces: bool = True,
) -> ConvergenceStudy:
    """Fill the study by pricing each (point, repeat) cell.

    Repeat r runs with master seed = seed + r so repeats are independent
    while the same repeat index reuses paths across points, which makes
    the per-point comparison a same-noise comparison.
    """
    basis_for = lambda sched: BasisSpec.blocked(
        sched.n_dates, min(group_size, sched.n_dates)
    )
    cells = []
    for point in study.points:
        n, n_iter, w = n_paths, n_iterations, workers
        if study.axis == "paths":
            n = point
        elif study.axis == "iterations":
            n_iter = point
        else:
            w = point
        plan = IterationPlan(n, n_iter)
        for r in range(study.repeats):
            t0 = time.perf_counter()
            res = price_parallel(
                params,
                payoff,
                schedule,
                plan,
                weights,
                basis_for(schedule),
                seed=seed + r,
                workers=w,
                max_batch=max_batch,
                ridge=ridge,
                keep_trace=keep_traces,
            )
            cells.append(
                StudyCell(
                    axis_value=point,
                    repeat=r,
                    price=res.price,
                    se_internal=res.standard_error,
                    wall_ms=1e3 * (time.perf_counter() - t0),
                    trace=tuple(res.trace) if keep_traces and res.trace else None,
                )
            )
    return replace(study, cells=tuple(cells))


def estimate_rate(study: ConvergenceStudy, use_internal: bool = True) -> RateEstimate:
    """Least-squares slope of log(s.e.) vs log(axis value).

    Uses the engine's reported standard error by default; pass
    use_internal=False for the across-repeat empirical s.e. (needs
    repeats >= 2), which also absorbs run-to-run policy variation.
    """
    summaries = study.point_summaries()
    if len(summaries) < 3:
        raise ConfigError("rate estimation needs at least 3 points")
    xs = []
    ys = []
    for s in summaries:
        se = s.se_internal_mean if use_internal else s.se_empirical
        if not (se > 0.0 and math.isfinite(se)):
            raise ConfigError(
                f"point {s.axis_value} has unusable s.e. {se}; "
                "empirical rates need repeats >= 2"
            )
        xs.append(math.log(s.axis_value))
        ys.append(math.log(se))
    x = np.asarray(xs)
    y = np.asarray(ys)
    n = x.size
    xc = x - x.mean()
    sxx = float(xc @ xc)
    slope = float(xc @ y) / sxx
    intercept = float(y.mean()) - slope * float(x.mean())
    resid = y - (intercept + slope * x)
    dof = n - 2
    var = float(resid @ resid) / dof / sxx if dof > 0 else 0.0
    return RateEstimate(slope=slope, slope_se=math.sqrt(var), n_points=n)
