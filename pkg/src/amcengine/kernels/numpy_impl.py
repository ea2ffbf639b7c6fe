"""Pure-numpy implementations of the hot kernels.

Vectorized across paths in bounded chunks so working-set size is set by
max_batch, not by the total path count.  Semantics are identical to the
numba backend; only summation order differs, so cross-backend prices
agree to roughly 1e-12 relative rather than bitwise.
"""
from __future__ import annotations

import numpy as np
from scipy.linalg import solve_banded

from ..rng import normal_block

MODE_EUROPEAN = 0
MODE_COEFFS = 1

FD_PROJECTION = 0
FD_PSOR = 1

FD_OK = 0


def simulate_paths(
    seed: int,
    path_lo: int,
    path_hi: int,
    spot: float,
    rate: float,
    vol: float,
    dt: np.ndarray,
) -> np.ndarray:
    """Exact lognormal paths on the date grid, shape (paths, dates)."""
    m = path_hi - path_lo
    n_steps = dt.shape[0]
    z = normal_block(seed, path_lo, path_hi, n_steps)
    drift = (rate - 0.5 * vol * vol) * dt
    shock = vol * np.sqrt(dt)
    out = np.empty((m, n_steps), dtype=np.float64)
    prev = np.full(m, spot, dtype=np.float64)
    for k in range(n_steps):
        prev = prev * np.exp(drift[k] + shock[k] * z[:, k])
        out[:, k] = prev
    return out


def _basis_matrix(x: np.ndarray, t: float, include_time: int) -> np.ndarray:
    p = 6 if include_time else 3
    f = np.empty((x.shape[0], p), dtype=np.float64)
    f[:, 0] = 1.0
    f[:, 1] = x
    f[:, 2] = x * x
    if include_time:
        f[:, 3] = t
        f[:, 4] = t * x
        f[:, 5] = t * x * x
    return f


def iteration_pass(
    seed: int,
    path_lo: int,
    path_hi: int,
    spot: float,
    rate: float,
    vol: float,
    strike: float,
    dt: np.ndarray,
    times: np.ndarray,
    mode: int,
    coef: np.ndarray,
    coef_ok: np.ndarray,
    block_of: np.ndarray,
    include_time: int,
    w_boundary: np.ndarray,
    w_beta: np.ndarray,
    max_batch: int,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, float, float]:
    """Simulate, value backward, and accumulate normal equations for one path range.

    Returns (u, v, mass, p1_sum, p1_sq_sum) where u/v/mass are per-block
    weighted sums of f f^T, f * discounted-continuation, and weights, and
    p1_sum/p1_sq_sum aggregate the per-path values at the first date.
    """
    n_dates = dt.shape[0]
    n_blocks = coef.shape[0]
    p = 6 if include_time else 3
    u = np.zeros((n_blocks, p, p), dtype=np.float64)
    v = np.zeros((n_blocks, p), dtype=np.float64)
    mass = np.zeros(n_blocks, dtype=np.float64)
    p1_sum = 0.0
    p1_sq_sum = 0.0
    df = np.exp(-rate * dt)

    for c0 in range(path_lo, path_hi, max_batch):
        c1 = min(c0 + max_batch, path_hi)
        x = simulate_paths(seed, c0, c1, spot, rate, vol, dt)
        payoff = np.maximum(strike - x, 0.0)
        value = payoff[:, n_dates - 1].copy()
        for k in range(n_dates - 2, -1, -1):
            cont = df[k + 1] * value
            xk = x[:, k]
            fk = payoff[:, k]
            if np.isnan(w_boundary[k]):
                w = (fk > 0.0).astype(np.float64)
            else:
                d = xk - w_boundary[k]
                w = np.exp(-(d * d) / (2.0 * w_beta[k] * w_beta[k]))
            b = block_of[k]
            f = _basis_matrix(xk, times[k], include_time)
            wf = f * w[:, None]
            u[b] += wf.T @ f
            v[b] += wf.T @ cont
            mass[b] += w.sum()
            if mode == MODE_COEFFS and coef_ok[b]:
                chat = f @ coef[b, :p]
                exercise = (fk > 0.0) & (fk >= chat)
                value = np.where(exercise, fk, cont)
            else:
                value = cont
        p1_sum += float(value.sum())
        p1_sq_sum += float(np.dot(value, value))
    return u, v, mass, p1_sum, p1_sq_sum


def fd_put(
    strike: float,
    rate: float,
    vol: float,
    maturity: float,
    n_time: int,
    n_space: int,
    s_max: float,
    exercise_mask: np.ndarray,
    method: int,
    psor_omega: float,
    psor_tol: float,
    psor_max_iter: int,
) -> tuple[np.ndarray, np.ndarray, int]:
    """Fully implicit put solver on a uniform grid, marching from maturity.

    Returns (values at t=0 on the spot grid, exercise boundary per time
    step with nan where the constraint is off, status).  Only pointwise
    projection is available on this backend; the numba backend adds PSOR.
    """
    if method != FD_PROJECTION:
        raise ValueError("numpy backend supports only the projection method")
    ds = s_max / n_space
    dt = maturity / n_time
    grid = np.arange(n_space + 1, dtype=np.float64) * ds
    intrinsic = np.maximum(strike - grid, 0.0)

    j = np.arange(1, n_space, dtype=np.float64)
    sig2j2 = vol * vol * j * j
    rj = rate * j
    lower = -0.5 * dt * (sig2j2 - rj)
    diag = 1.0 + dt * (sig2j2 + rate)
    upper = -0.5 * dt * (sig2j2 + rj)
    ab = np.zeros((3, n_space - 1), dtype=np.float64)
    ab[0, 1:] = upper[:-1]
    ab[1, :] = diag
    ab[2, :-1] = lower[1:]

    values = intrinsic.copy()
    boundary = np.full(n_time + 1, np.nan)
    btol = 1e-9 * strike
    if exercise_mask[n_time]:
        boundary[n_time] = _boundary_read(grid, values, intrinsic, btol)

    for step in range(n_time - 1, -1, -1):
        t = step * dt
        v_zero = strike * np.exp(-rate * (maturity - t))
        rhs = values[1:n_space].copy()
        rhs[0] -= lower[0] * v_zero
        interior = solve_banded((1, 1), ab, rhs)
        values[0] = v_zero
        values[1:n_space] = interior
        values[n_space] = 0.0
        if exercise_mask[step]:
            np.maximum(values, intrinsic, out=values)
            boundary[step] = _boundary_read(grid, values, intrinsic, btol)
    return values, boundary, FD_OK


def _boundary_read(grid: np.ndarray, values: np.ndarray, intrinsic: np.ndarray, btol: float) -> float:
    """Largest grid spot where the value sits on the exercise payoff."""
    held = (intrinsic > 0.0) & (values - intrinsic <= btol)
    idx = np.nonzero(held)[0]
    if idx.size == 0:
        return 0.0
    return float(grid[idx[-1]])
