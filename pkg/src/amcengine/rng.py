"""Counter-based random numbers for reproducible parallel simulation.

Every normal variate is a pure function of (master_seed, path_index,
step_index), so any partition of paths across workers or iterations
draws the identical sample multiset.  Uniforms come from Philox4x32-10
keyed by the seed with the (path, step) pair as the counter; normals are
obtained by inverting the standard normal CDF, one uniform per normal.
"""
from __future__ import annotations

import numpy as np

PHILOX_M0 = 0xD2511F53
PHILOX_M1 = 0xCD9E8D57
PHILOX_W0 = 0x9E3779B9
PHILOX_W1 = 0xBB67AE85
PHILOX_ROUNDS = 10

_MASK32 = 0xFFFFFFFF
_MASK64 = 0xFFFFFFFFFFFFFFFF

# 2^-53; uniforms are (mantissa + 0.5) * 2^-53, strictly inside (0, 1).
_U53 = 1.0 / 9007199254740992.0


def philox4x32(c0: int, c1: int, c2: int, c3: int, k0: int, k1: int) -> tuple[int, int, int, int]:
    """One Philox4x32-10 block: four 32-bit outputs from counter and key."""
    for _ in range(PHILOX_ROUNDS):
        p0 = (PHILOX_M0 * c0) & _MASK64
        p1 = (PHILOX_M1 * c2) & _MASK64
        hi0, lo0 = p0 >> 32, p0 & _MASK32
        hi1, lo1 = p1 >> 32, p1 & _MASK32
        c0 = hi1 ^ c1 ^ k0
        c1 = lo1
        c2 = hi0 ^ c3 ^ k1
        c3 = lo0
        k0 = (k0 + PHILOX_W0) & _MASK32
        k1 = (k1 + PHILOX_W1) & _MASK32
    return c0, c1, c2, c3


def uniform_scalar(master_seed: int, path_index: int, step_index: int) -> float:
    """Uniform in (0, 1) addressed by (seed, path, step); scalar reference."""
    seed = master_seed & _MASK64
    c0, c1, c2, c3 = philox4x32(
        path_index & _MASK32,
        (path_index >> 32) & _MASK32,
        step_index & _MASK32,
        0,
        seed & _MASK32,
        (seed >> 32) & _MASK32,
    )
    bits = ((c0 << 32) | c1) >> 11
    return (bits + 0.5) * _U53


def uniform_block(master_seed: int, path_lo: int, path_hi: int, n_steps: int) -> np.ndarray:
    """Uniforms for paths [path_lo, path_hi) x steps [0, n_steps), vectorized."""
    m = path_hi - path_lo
    paths = np.arange(path_lo, path_hi, dtype=np.uint64)[:, None]
    steps = np.arange(n_steps, dtype=np.uint64)[None, :]
    c0 = np.broadcast_to(paths & np.uint64(_MASK32), (m, n_steps)).copy()
    c1 = np.broadcast_to(paths >> np.uint64(32), (m, n_steps)).copy()
    c2 = np.broadcast_to(steps, (m, n_steps)).copy()
    c3 = np.zeros((m, n_steps), dtype=np.uint64)
    seed = np.uint64(master_seed & _MASK64)
    k0 = np.uint64(int(seed) & _MASK32)
    k1 = np.uint64((int(seed) >> 32) & _MASK32)
    m0 = np.uint64(PHILOX_M0)
    m1 = np.uint64(PHILOX_M1)
    w0 = np.uint64(PHILOX_W0)
    w1 = np.uint64(PHILOX_W1)
    mask32 = np.uint64(_MASK32)
    shift = np.uint64(32)
    for _ in range(PHILOX_ROUNDS):
        p0 = m0 * c0
        p1 = m1 * c2
        hi0 = p0 >> shift
        lo0 = p0 & mask32
        hi1 = p1 >> shift
        lo1 = p1 & mask32
        c0 = hi1 ^ c1 ^ k0
        c1 = lo1
        c2 = hi0 ^ c3 ^ k1
        c3 = lo0
        k0 = (k0 + w0) & mask32
        k1 = (k1 + w1) & mask32
    bits = ((c0 << shift) | c1) >> np.uint64(11)
    return (bits.astype(np.float64) + 0.5) * _U53


# Wichura's PPND16 rational approximations for the inverse normal CDF,
# accurate to ~1e-16 over (0, 1).
_NORM_A = (
    3.3871328727963666080e0,
    1.3314166789178437745e2,
    1.9715909503065514427e3,
    1.3731693765509461125e4,
    4.5921953931549871457e4,
    6.7265770927008700853e4,
    3.3430575583588128105e4,
    2.5090809287301226727e3,
)
_NORM_B = (
    1.0,
    4.2313330701600911252e1,
    6.8718700749205790830e2,
    5.3941960214247511077e3,
    2.1213794301586595867e4,
    3.9307895800092710610e4,
    2.8729085735721942674e4,
    5.2264952788528545610e3,
)
_NORM_C = (
    1.42343711074968357734e0,
    4.63033784615654529590e0,
    5.76949722146069140550e0,
    3.64784832476320460504e0,
    1.27045825245236838258e0,
    2.41780725177450611770e-1,
    2.27238449892691845833e-2,
    7.74545014278341407640e-4,
)
_NORM_D = (
    1.0,
    2.05319162663775882187e0,
    1.67638483018380384940e0,
    6.89767334985100004550e-1,
    1.48103976427480074590e-1,
    1.51986665636164571966e-2,
    5.47593808499534494600e-4,
    1.05075007164441684324e-9,
)
_NORM_E = (
    6.65790464350110377720e0,
    5.46378491116411436990e0,
    1.78482653991729133580e0,
    2.96560571828504891230e-1,
    2.65321895265761230930e-2,
    1.24266094738807843860e-3,
    2.71155556874348757815e-5,
    2.01033439929228813265e-7,
)
_NORM_F = (
    1.0,
    5.99832206555887937690e-1,
    1.36929880922735805310e-1,
    1.48753612908506148525e-2,
    7.86869131145613259100e-4,
    1.84631831751005468180e-5,
    1.42151175831644588870e-7,
    2.04426310338993978564e-15,
)


def _poly(coeffs: tuple[float, ...], r):
    acc = coeffs[7]
    for c in (coeffs[6], coeffs[5], coeffs[4], coeffs[3], coeffs[2], coeffs[1], coeffs[0]):
        acc = acc * r + c
    return acc


def normal_inv_cdf(u: float) -> float:
    """Inverse standard normal CDF for scalar u in (0, 1)."""
    q = u - 0.5
    if abs(q) <= 0.425:
        r = 0.180625 - q * q
        return q * _poly(_NORM_A, r) / _poly(_NORM_B, r)
    r = u if q < 0.0 else 1.0 - u
    r = np.sqrt(-np.log(r))
    if r <= 5.0:
        r = r - 1.6
        val = _poly(_NORM_C, r) / _poly(_NORM_D, r)
    else:
        r = r - 5.0
        val = _poly(_NORM_E, r) / _poly(_NORM_F, r)
    return -val if q < 0.0 else val


def normal_inv_cdf_array(u: np.ndarray) -> np.ndarray:
    """Vectorized inverse standard normal CDF; u strictly inside (0, 1)."""
    u = np.asarray(u, dtype=np.float64)
    q = u - 0.5
    out = np.empty_like(u)

    central = np.abs(q) <= 0.425
    r = 0.180625 - q[central] * q[central]
    out[central] = q[central] * _poly(_NORM_A, r) / _poly(_NORM_B, r)

    tail = ~central
    qt = q[tail]
    rt = np.where(qt < 0.0, u[tail], 1.0 - u[tail])
    rt = np.sqrt(-np.log(rt))
    near = rt <= 5.0
    vt = np.empty_like(rt)
    rn = rt[near] - 1.6
    vt[near] = _poly(_NORM_C, rn) / _poly(_NORM_D, rn)
    rf = rt[~near] - 5.0
    vt[~near] = _poly(_NORM_E, rf) / _poly(_NORM_F, rf)
    out[tail] = np.where(qt < 0.0, -vt, vt)
    return out


def normal_block(master_seed: int, path_lo: int, path_hi: int, n_steps: int) -> np.ndarray:
    """Standard normal draws for a block of paths, shape (paths, steps)."""
    return normal_inv_cdf_array(uniform_block(master_seed, path_lo, path_hi, n_steps))
