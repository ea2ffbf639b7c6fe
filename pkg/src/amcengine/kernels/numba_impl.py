"""Numba implementations of the hot kernels.

Per-path scalar loops compiled with nogil so a thread pool gets real
parallelism.  The random-number addressing and valuation logic mirror
numpy_impl exactly; see that module for the semantics.
"""
from __future__ import annotations

import math

import numpy as np
from numba import njit

MODE_EUROPEAN = 0
MODE_COEFFS = 1

FD_PROJECTION = 0
FD_PSOR = 1

FD_OK = 0

_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = np.uint64(0x9E3779B9)
_W1 = np.uint64(0xBB67AE85)
_MASK32 = np.uint64(0xFFFFFFFF)
_SH32 = np.uint64(32)
_SH11 = np.uint64(11)
_U53 = 1.0 / 9007199254740992.0


@njit(cache=True, nogil=True)
def _uniform(seed: np.uint64, path: np.uint64, step: np.uint64) -> float:
    c0 = path & _MASK32
    c1 = path >> _SH32
    c2 = step
    c3 = np.uint64(0)
    k0 = seed & _MASK32
    k1 = seed >> _SH32
    for _ in range(10):
        p0 = _M0 * c0
        p1 = _M1 * c2
        hi0 = p0 >> _SH32
        lo0 = p0 & _MASK32
        hi1 = p1 >> _SH32
        lo1 = p1 & _MASK32
        c0 = hi1 ^ c1 ^ k0
        c1 = lo1
        c2 = hi0 ^ c3 ^ k1
        c3 = lo0
        k0 = (k0 + _W0) & _MASK32
        k1 = (k1 + _W1) & _MASK32
    bits = ((c0 << _SH32) | c1) >> _SH11
    return (bits + 0.5) * _U53


@njit(cache=True, nogil=True)
def _ninv(u: float) -> float:
    q = u - 0.5
    if abs(q) <= 0.425:
        r = 0.180625 - q * q
        num = (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r
                    + 6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r
                  + 1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r
                + 1.3314166789178437745e2) * r + 3.3871328727963666080e0)
        den = (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r
                    + 3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r
                  + 5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r
                + 4.2313330701600911252e1) * r + 1.0)
        return q * num / den
    if q < 0.0:
        r = u
    else:
        r = 1.0 - u
    r = math.sqrt(-math.log(r))
    if r <= 5.0:
        r = r - 1.6
        num = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r
                    + 2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r
                  + 3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r
                + 4.63033784615654529590e0) * r + 1.42343711074968357734e0)
        den = (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r
                    + 1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r
                  + 6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r
                + 2.05319162663775882187e0) * r + 1.0)
    else:
        r = r - 5.0
        num = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r
                    + 1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r
                  + 2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r
                + 5.46378491116411436990e0) * r + 6.65790464350110377720e0)
        den = (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r
                    + 1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r
                  + 1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r
                + 5.99832206555887937690e-1) * r + 1.0)
    val = num / den
    if q < 0.0:
        return -val
    return val


@njit(cache=True, nogil=True)
def simulate_paths(
    seed: int,
    path_lo: int,
    path_hi: int,
    spot: float,
    rate: float,
    vol: float,
    dt: np.ndarray,
) -> np.ndarray:
    m = path_hi - path_lo
    n_steps = dt.shape[0]
    drift = (rate - 0.5 * vol * vol) * dt
    shock = vol * np.sqrt(dt)
    out = np.empty((m, n_steps), dtype=np.float64)
    useed = np.uint64(seed)
    for idx in range(m):
        upath = np.uint64(path_lo + idx)
        prev = spot
        for k in range(n_steps):
            z = _ninv(_uniform(useed, upath, np.uint64(k)))
            prev = prev * math.exp(drift[k] + shock[k] * z)
            out[idx, k] = prev
    return out


@njit(cache=True, nogil=True)
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
) -> tuple:
    n_dates = dt.shape[0]
    n_blocks = coef.shape[0]
    p = 6 if include_time else 3
    u = np.zeros((n_blocks, p, p), dtype=np.float64)
    v = np.zeros((n_blocks, p), dtype=np.float64)
    mass = np.zeros(n_blocks, dtype=np.float64)
    drift = (rate - 0.5 * vol * vol) * dt
    shock = vol * np.sqrt(dt)
    df = np.exp(-rate * dt)
    x = np.empty(n_dates, dtype=np.float64)
    f = np.empty(6, dtype=np.float64)
    p1_sum = 0.0
    p1_sq_sum = 0.0
    useed = np.uint64(seed)
    for j in range(path_lo, path_hi):
        upath = np.uint64(j)
        prev = spot
        for k in range(n_dates):
            z = _ninv(_uniform(useed, upath, np.uint64(k)))
            prev = prev * math.exp(drift[k] + shock[k] * z)
            x[k] = prev
        value = strike - x[n_dates - 1]
        if value < 0.0:
            value = 0.0
        for k in range(n_dates - 2, -1, -1):
            cont = df[k + 1] * value
            xk = x[k]
            fk = strike - xk
            if fk < 0.0:
                fk = 0.0
            if w_boundary[k] == w_boundary[k]:
                d = xk - w_boundary[k]
                w = math.exp(-(d * d) / (2.0 * w_beta[k] * w_beta[k]))
            else:
                w = 1.0 if fk > 0.0 else 0.0
            f[0] = 1.0
            f[1] = xk
            f[2] = xk * xk
            if include_time:
                t = times[k]
                f[3] = t
                f[4] = t * xk
                f[5] = t * xk * xk
            b = block_of[k]
            if w != 0.0:
                for a in range(p):
                    wfa = w * f[a]
                    v[b, a] += wfa * cont
                    for c in range(p):
                        u[b, a, c] += wfa * f[c]
                mass[b] += w
            if mode == MODE_COEFFS and coef_ok[b]:
                chat = 0.0
                for a in range(p):
                    chat += coef[b, a] * f[a]
                if fk > 0.0 and fk >= chat:
                    value = fk
                else:
                    value = cont
            else:
                value = cont
        p1_sum += value
        p1_sq_sum += value * value
    return u, v, mass, p1_sum, p1_sq_sum


@njit(cache=True, nogil=True)
def _boundary_read(grid: np.ndarray, values: np.ndarray, intrinsic: np.ndarray, btol: float) -> float:
    for j in range(grid.shape[0] - 1, -1, -1):
        if intrinsic[j] > 0.0 and values[j] - intrinsic[j] <= btol:
            return grid[j]
    return 0.0


@njit(cache=True, nogil=True)
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
) -> tuple:
    ds = s_max / n_space
    dtau = maturity / n_time
    n_int = n_space - 1
    grid = np.empty(n_space + 1, dtype=np.float64)
    for j in range(n_space + 1):
        grid[j] = j * ds
    intrinsic = np.maximum(strike - grid, 0.0)

    lower = np.empty(n_int, dtype=np.float64)
    diag = np.empty(n_int, dtype=np.float64)
    upper = np.empty(n_int, dtype=np.float64)
    for i in range(n_int):
        jj = float(i + 1)
        sig2j2 = vol * vol * jj * jj
        rj = rate * jj
        lower[i] = -0.5 * dtau * (sig2j2 - rj)
        diag[i] = 1.0 + dtau * (sig2j2 + rate)
        upper[i] = -0.5 * dtau * (sig2j2 + rj)

    # Thomas forward-elimination factors; the matrix is time-independent.
    cp = np.empty(n_int, dtype=np.float64)
    denom = np.empty(n_int, dtype=np.float64)
    denom[0] = diag[0]
    cp[0] = upper[0] / denom[0]
    for i in range(1, n_int):
        denom[i] = diag[i] - lower[i] * cp[i - 1]
        cp[i] = upper[i] / denom[i]

    values = intrinsic.copy()
    boundary = np.full(n_time + 1, np.nan)
    btol = 1e-9 * strike
    status = FD_OK
    if exercise_mask[n_time]:
        boundary[n_time] = _boundary_read(grid, values, intrinsic, btol)

    dp = np.empty(n_int, dtype=np.float64)
    rhs = np.empty(n_int, dtype=np.float64)
    for step in range(n_time - 1, -1, -1):
        t = step * dtau
        v_zero = strike * math.exp(-rate * (maturity - t))
        if method == FD_PROJECTION:
            dp[0] = (values[1] - lower[0] * v_zero) / denom[0]
            for i in range(1, n_int):
                dp[i] = (values[i + 1] - lower[i] * dp[i - 1]) / denom[i]
            values[n_space - 1] = dp[n_int - 1]
            for i in range(n_int - 2, -1, -1):
                values[i + 1] = dp[i] - cp[i] * values[i + 2]
            values[0] = v_zero
            values[n_space] = 0.0
            if exercise_mask[step]:
                for j in range(n_space + 1):
                    if values[j] < intrinsic[j]:
                        values[j] = intrinsic[j]
        else:
            for i in range(n_int):
                rhs[i] = values[i + 1]
            rhs[0] -= lower[0] * v_zero
            project = exercise_mask[step] != 0
            converged = False
            for _ in range(psor_max_iter):
                err = 0.0
                for i in range(n_int):
                    left = v_zero if i == 0 else values[i]
                    right = 0.0 if i == n_int - 1 else values[i + 2]
                    resid = rhs[i] - lower[i] * left - diag[i] * values[i + 1] - upper[i] * right
                    vnew = values[i + 1] + psor_omega * resid / diag[i]
                    if project and vnew < intrinsic[i + 1]:
                        vnew = intrinsic[i + 1]
                    delta = vnew - values[i + 1]
                    if delta < 0.0:
                        delta = -delta
                    if delta > err:
                        err = delta
                    values[i + 1] = vnew
                if err < psor_tol:
                    converged = True
                    break
            values[0] = v_zero
            values[n_space] = 0.0
            if project and values[0] < intrinsic[0]:
                values[0] = intrinsic[0]
            if not converged:
                status = step + 1
                break
        if exercise_mask[step]:
            boundary[step] = _boundary_read(grid, values, intrinsic, btol)
    return values, boundary, status
