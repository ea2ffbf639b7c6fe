"""Blocked least-squares regression via accumulated normal equations.

Continuation values are regressed on a polynomial basis with exercise
dates grouped into contiguous blocks that share one coefficient vector;
time enters the basis so a block can span dates.  Engines accumulate
weighted sums U = sum w f f^T and V = sum w f y instead of storing
samples, so two accumulations over disjoint data merge by addition.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import ConfigError, DegenerateRegressionError

# Relative Tikhonov factor. Raw quadratic monomials of spots near 40 give
# tr(U)/p ~ 1e6 * n while the curvature eigenvalue of U can be ~1e-6 * n at
# short horizons, so anything much above 1e-13 visibly distorts the fitted
# continuation and the exercise policy (several cents on the benchmark put).
DEFAULT_RIDGE = 1e-13


@dataclass(frozen=True)
class BasisSpec:
    """Date blocking and basis layout for the continuation regression.

    group_size >= 2 pools dates into blocks with the six functions
    {1, S, S^2, t, tS, tS^2}; group_size == 1 is the date-per-block
    degenerate case with {1, S, S^2} (a time column would be constant
    within a block and collinear with the intercept).
    """

    n_dates: int
    group_size: int
    include_time: bool

    def __post_init__(self) -> None:
        if self.n_dates < 1:
            raise ConfigError(f"n_dates must be >= 1, got {self.n_dates}")
        if not (1 <= self.group_size <= self.n_dates):
            raise ConfigError(
                f"group_size must be in [1, {self.n_dates}], got {self.group_size}"
            )
        if self.include_time and self.group_size < 2:
            raise ConfigError("the time-augmented basis needs group_size >= 2")
        if not self.include_time and self.group_size != 1:
            raise ConfigError("the 3-function basis requires group_size == 1")

    @classmethod
    def blocked(cls, n_dates: int, group_size: int) -> "BasisSpec":
        """Canonical layout: time in the basis unless dates are unpooled."""
        return cls(n_dates, group_size, include_time=group_size > 1)

    @property
    def n_functions(self) -> int:
        return 6 if self.include_time else 3

    @property
    def n_blocks(self) -> int:
        return -(-self.n_dates // self.group_size)

    def block_of(self, date_index: int) -> int:
        if not (0 <= date_index < self.n_dates):
            raise ConfigError(f"date_index {date_index} outside [0, {self.n_dates})")
        return date_index // self.group_size

    def block_of_dates(self) -> np.ndarray:
        return np.arange(self.n_dates, dtype=np.int64) // self.group_size

    @property
    def fingerprint(self) -> str:
        return f"dates={self.n_dates};group={self.group_size};time={int(self.include_time)}"


def basis_eval(spec: BasisSpec, spot: float, time: float) -> np.ndarray:
    """Basis vector at one (spot, time) point."""
    if spec.include_time:
        return np.array(
            [1.0, spot, spot * spot, time, time * spot, time * spot * spot],
            dtype=np.float64,
        )
    return np.array([1.0, spot, spot * spot], dtype=np.float64)


def solve_spd_system(u: np.ndarray, v: np.ndarray, ridge: float, label: str) -> np.ndarray:
    """Solve (u + ridge * tr(u)/p * I) a = v by Cholesky; label names the failure."""
    p = u.shape[0]
    a = u
    if ridge > 0.0:
        a = u + (ridge * np.trace(u) / p) * np.eye(p)
    try:
        factor = cho_factor(a, lower=True)
    except np.linalg.LinAlgError as exc:
        raise DegenerateRegressionError(f"normal equations singular for {label}") from exc
    return cho_solve(factor, v)


class NormalEquations:
    """Per-block running sums U, V and total accumulated weight."""

    def __init__(self, spec: BasisSpec) -> None:
        self.spec = spec
        p = spec.n_functions
        self.u = np.zeros((spec.n_blocks, p, p), dtype=np.float64)
        self.v = np.zeros((spec.n_blocks, p), dtype=np.float64)
        self.mass = np.zeros(spec.n_blocks, dtype=np.float64)

    def accumulate(self, block: int, weight: float, f: np.ndarray, value: float) -> None:
        """Add one weighted sample: U += w f f^T, V += w f y."""
        if not (weight >= 0.0 and math.isfinite(weight)):
            raise ConfigError(f"weight must be non-negative and finite, got {weight}")
        if f.shape != (self.spec.n_functions,):
            raise ConfigError(f"basis vector has shape {f.shape}, expected ({self.spec.n_functions},)")
        if weight == 0.0:
            return
        wf = weight * f
        self.u[block] += np.outer(wf, f)
        self.v[block] += wf * value
        self.mass[block] += weight

    def add_raw(self, u: np.ndarray, v: np.ndarray, mass: np.ndarray) -> None:
        """Merge kernel partials (already summed over a path range)."""
        self.u += u
        self.v += v
        self.mass += mass

    def scale(self, factor: float) -> None:
        """Rescale every accumulated sum, e.g. to down-weight old iterations."""
        if not (factor >= 0.0 and math.isfinite(factor)):
            raise ConfigError(f"scale factor must be non-negative and finite, got {factor}")
        self.u *= factor
        self.v *= factor
        self.mass *= factor

    def copy(self) -> "NormalEquations":
        out = NormalEquations(self.spec)
        out.u = self.u.copy()
        out.v = self.v.copy()
        out.mass = self.mass.copy()
        return out

    def solve(self, ridge: float = DEFAULT_RIDGE) -> "CoefficientSet":
        """Per-block coefficients; blocks without accumulated weight stay unset."""
        if ridge < 0.0:
            raise ConfigError(f"ridge must be non-negative, got {ridge}")
        alphas: list[np.ndarray | None] = []
        for b in range(self.spec.n_blocks):
            if self.mass[b] <= 0.0:
                alphas.append(None)
                continue
            try:
                alphas.append(solve_spd_system(self.u[b], self.v[b], ridge, f"block {b}"))
            except DegenerateRegressionError as exc:
                raise DegenerateRegressionError(str(exc), block=b) from exc
        return CoefficientSet(self.spec, tuple(alphas))

    def debug_dict(self, coeffs: "CoefficientSet | None" = None) -> dict:
        """Row-major dump of U, V (and alpha when provided) per block."""
        blocks = []
        for b in range(self.spec.n_blocks):
            entry = {
                "block": b,
                "u": [float(x) for x in self.u[b].ravel()],
                "v": [float(x) for x in self.v[b]],
                "mass": float(self.mass[b]),
            }
            if coeffs is not None:
                a = coeffs.alphas[b]
                entry["alpha"] = None if a is None else [float(x) for x in a]
            blocks.append(entry)
        return {"fingerprint": self.spec.fingerprint, "blocks": blocks}


def merge(a: NormalEquations, b: NormalEquations) -> NormalEquations:
    """Sum of two accumulations over disjoint data; linear and associative."""
    if a.spec != b.spec:
        raise ConfigError("cannot merge normal equations with different basis specs")
    out = a.copy()
    out.add_raw(b.u, b.v, b.mass)
    return out


@dataclass(frozen=True)
class CoefficientSet:
    """Solved per-block coefficients; None marks a block with no data yet."""

    spec: BasisSpec
    alphas: tuple

    @classmethod
    def empty(cls, spec: BasisSpec) -> "CoefficientSet":
        return cls(spec, tuple(None for _ in range(spec.n_blocks)))

    @property
    def bootstrap(self) -> bool:
        """True when no block has coefficients yet."""
        return all(a is None for a in self.alphas)

    def continuation_value(self, spot: float, time: float, date_index: int) -> float:
        block = self.spec.block_of(date_index)
        alpha = self.alphas[block]
        if alpha is None:
            raise DegenerateRegressionError(
                f"no coefficients for block {block} (date {date_index})", block=block
            )
        return float(basis_eval(self.spec, spot, time) @ alpha)

    def packed(self) -> tuple[np.ndarray, np.ndarray]:
        """Dense (coef, ok) arrays for the kernels."""
        p = self.spec.n_functions
        coef = np.zeros((self.spec.n_blocks, p), dtype=np.float64)
        ok = np.zeros(self.spec.n_blocks, dtype=np.uint8)
        for b, alpha in enumerate(self.alphas):
            if alpha is not None:
                coef[b] = alpha
                ok[b] = 1
        return coef, ok

    def to_json_dict(self) -> dict:
        return {
            "basis_fingerprint": self.spec.fingerprint,
            "blocks": [None if a is None else [float(x) for x in a] for a in self.alphas],
        }

    @classmethod
    def from_json_dict(cls, data: dict, spec: BasisSpec) -> "CoefficientSet":
        if not isinstance(data, dict) or "basis_fingerprint" not in data or "blocks" not in data:
            raise ConfigError("warm-start data needs 'basis_fingerprint' and 'blocks'")
        if data["basis_fingerprint"] != spec.fingerprint:
            raise ConfigError(
                f"warm-start fingerprint {data['basis_fingerprint']!r} does not match "
                f"the run's basis {spec.fingerprint!r}"
            )
        blocks = data["blocks"]
        if len(blocks) != spec.n_blocks:
            raise ConfigError(
                f"warm-start has {len(blocks)} blocks, basis needs {spec.n_blocks}"
            )
        alphas = []
        for b, entry in enumerate(blocks):
            if entry is None:
                alphas.append(None)
                continue
            arr = np.asarray(entry, dtype=np.float64)
            if arr.shape != (spec.n_functions,):
                raise ConfigError(f"warm-start block {b} has {arr.size} coefficients, expected {spec.n_functions}")
            alphas.append(arr)
        return cls(spec, tuple(alphas))


def save_warm_start(coeffs: CoefficientSet, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(coeffs.to_json_dict(), fh, indent=2)


def load_warm_start(path: str, spec: BasisSpec) -> CoefficientSet:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read warm-start file {path}: {exc}") from exc
    return CoefficientSet.from_json_dict(data, spec)
