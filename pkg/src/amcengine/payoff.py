"""Exercise payoffs. Only the vanilla put ships; the interface is the contract."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Protocol, runtime_checkable

import numpy as np

from .errors import ConfigError


@runtime_checkable
class Payoff(Protocol):
    """What an engine needs from a product: intrinsic value and moneyness."""

    strike: float

    def exercise_value(self, spot): ...

    def in_the_money(self, spot): ...


@dataclass(frozen=True)
class PutPayoff:
    """Vanilla put: exercise value (K - S)+, in the money iff S < K."""

    strike: float

    def __post_init__(self) -> None:
        if not (self.strike > 0.0 and math.isfinite(self.strike)):
            raise ConfigError(f"strike must be positive and finite, got {self.strike}")

    def exercise_value(self, spot):
        """(K - S)+ for a scalar spot or an ndarray of spots."""
        if isinstance(spot, np.ndarray):
            return np.maximum(self.strike - spot, 0.0)
        return max(self.strike - spot, 0.0)

    def in_the_money(self, spot):
        """Strictly in the money; S == K does not count."""
        if isinstance(spot, np.ndarray):
            return spot < self.strike
        return spot < self.strike
