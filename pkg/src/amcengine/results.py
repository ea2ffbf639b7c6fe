"""Result containers shared by the pricing engines and the CLI."""
from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass(frozen=True)
class IterationTraceRow:
    """One row of the running-estimate trace of an iterative run."""

    iteration: int
    running_price: float
    running_se: float
    boundary_mid: float
    wall_ms: float

    def to_dict(self) -> dict:
        return {
            "iteration": self.iteration,
            "running_price": self.running_price,
            "running_se": self.running_se,
            "boundary_mid": self.boundary_mid,
            "wall_ms": self.wall_ms,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "IterationTraceRow":
        return cls(
            int(d["iteration"]),
            float(d["running_price"]),
            float(d["running_se"]),
            float(d["boundary_mid"]),
            float(d["wall_ms"]),
        )


@dataclass
class PricingResult:
    """Price, uncertainty, and run metadata from any engine."""

    engine: str
    price: float
    standard_error: float
    n_paths: int
    wall_ms: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)
    trace: list | None = None
    boundary: list | None = None
    coefficients: dict | list | None = None

    @property
    def ci95_halfwidth(self) -> float:
        return 1.96 * self.standard_error

    def format_price(self) -> str:
        """Desk convention: price to 3 decimals, s.e. in parentheses."""
        se = f"{self.standard_error:.3f}"
        if se.startswith("0."):
            se = se[1:]
        return f"{self.price:.3f} ({se})"

    def to_dict(self) -> dict:
        out = {
            "engine": self.engine,
            "price": self.price,
            "standard_error": self.standard_error,
            "ci95_halfwidth": self.ci95_halfwidth,
            "n_paths": self.n_paths,
            "wall_ms": dict(self.wall_ms),
            "config": dict(self.config),
        }
        if self.trace is not None:
            out["trace"] = [row.to_dict() for row in self.trace]
        if self.boundary is not None:
            out["boundary"] = [[t, b] for t, b in self.boundary]
        if self.coefficients is not None:
            out["coefficients"] = self.coefficients
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "PricingResult":
        trace = None
        if "trace" in d:
            trace = [IterationTraceRow.from_dict(row) for row in d["trace"]]
        boundary = None
        if "boundary" in d:
            boundary = [(float(t), float(b)) for t, b in d["boundary"]]
        return cls(
            engine=str(d["engine"]),
            price=float(d["price"]),
            standard_error=float(d["standard_error"]),
            n_paths=int(d["n_paths"]),
            wall_ms={k: float(v) for k, v in d.get("wall_ms", {}).items()},
            config=dict(d.get("config", {})),
            trace=trace,
            boundary=boundary,
            coefficients=d.get("coefficients"),
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PricingResult):
            return NotImplemented
        def _eq(a, b):
            if isinstance(a, float) and isinstance(b, float):
                return (a == b) or (math.isnan(a) and math.isnan(b))
            return a == b
        if not (
            self.engine == other.engine
            and _eq(self.price, other.price)
            and _eq(self.standard_error, other.standard_error)
            and self.n_paths == other.n_paths
            and self.wall_ms == other.wall_ms
            and self.config == other.config
            and self.coefficients == other.coefficients
        ):
            return False
        if (self.boundary is None) != (other.boundary is None):
            return False
        if self.boundary is not None:
            if len(self.boundary) != len(other.boundary):
                return False
            for (ta, ba), (tb, bb) in zip(self.boundary, other.boundary):
                if not (_eq(float(ta), float(tb)) and _eq(float(ba), float(bb))):
                    return False
        if (self.trace is None) != (other.trace is None):
            return False
        if self.trace is not None:
            if len(self.trace) != len(other.trace):
                return False
            for a, b in zip(self.trace, other.trace):
                if not (
                    a.iteration == b.iteration
                    and _eq(a.running_price, b.running_price)
                    and _eq(a.running_se, b.running_se)
                    and _eq(a.boundary_mid, b.boundary_mid)
                    and _eq(a.wall_ms, b.wall_ms)
                ):
                    return False
        return True
