"""Shared fixtures: the benchmark market setup used across the suite."""
import pytest

from amcengine import ExerciseSchedule, MarketParams, PutPayoff


@pytest.fixture(scope="session")
def bench_params() -> MarketParams:
    return MarketParams(spot=36.0, rate=0.06, vol=0.2)


@pytest.fixture(scope="session")
def bench_payoff() -> PutPayoff:
    return PutPayoff(strike=40.0)


@pytest.fixture(scope="session")
def bench_schedule() -> ExerciseSchedule:
    return ExerciseSchedule.from_dates_per_year(1.0, 50)
