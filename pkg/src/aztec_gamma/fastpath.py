"""Jitted kernels for the large-size midpoint sampling runs.

The partition-table fill is a strict 2-D scan, so at size ~512 pure numpy
(even wavefront-vectorized) is the bottleneck.  These kernels draw the
environment, fill the table, and walk the path entirely in compiled code,
one environment per loop iteration, parallel over environments.  Each
environment owns a SplitMix64-derived counter state seeded outside, so the
output is reproducible regardless of thread scheduling.

Gamma variates use the Marsaglia-Tsang squeeze for shape >= 1 and the
shape-boost with a log-space uniform power for shape < 1, returning logs
directly so small shapes cannot underflow.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit, prange
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a soft dependency
    HAVE_NUMBA = False

    def njit(*a, **k):
        def deco(f):
            return f
        return deco

    prange = range

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


@njit(cache=True, inline="always")
def _next_u64(state):
    s = state[0] + _GOLDEN
    state[0] = s
    z = s
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


@njit(cache=True, inline="always")
def _u01(state) -> float:
    # 53-bit mantissa, strictly inside (0, 1)
    return (float(_next_u64(state) >> np.uint64(11)) + 0.5) * 1.1102230246251565e-16


@njit(cache=True, inline="always")
def _normal(state) -> float:
    u1 = _u01(state)
    u2 = _u01(state)
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(6.283185307179586 * u2)


@njit(cache=True)
def _log_gamma_draw1(shape: float, state) -> float:
    """log of a Gamma(shape, 1) draw, valid for any positive shape."""
    boost = 0.0
    a = shape
    if a < 1.0:
        boost = np.log(_u01(state)) / a
        a = a + 1.0
    d = a - 1.0 / 3.0
    c = 1.0 / np.sqrt(9.0 * d)
    while True:
        x = _normal(state)
        v = 1.0 + c * x
        if v <= 0.0:
            continue
        v = v * v * v
        u = _u01(state)
        if np.log(u) < 0.5 * x * x + d - d * v + d * np.log(v):
            return np.log(d * v) + boost


@njit(cache=True, inline="always")
def _logaddexp(a: float, b: float) -> float:
    if a < b:
        a, b = b, a
    d = a - b
    if d > 40.0:        # addend below double resolution
        return a
    return a + np.log1p(np.exp(-d))


@njit(cache=True, nogil=True)
def logz_dfs(offsets: np.ndarray, blk: np.ndarray, lwt: np.ndarray,
             order: np.ndarray) -> float:
    """Streaming log of the permanent-like sum over perfect matchings.

    Iterative depth-first backtracking over whites in the given order with
    a used-black bitmask; leaves accumulate through an online log-sum-exp.
    Returns -inf when no perfect matching exists.
    """
    nw = order.shape[0]
    if nw == 0:
        return 0.0
    ei_stack = np.empty(nw, dtype=np.int64)
    taken = np.zeros(nw, dtype=np.uint64)
    lw_stack = np.zeros(nw + 1)
    used = np.uint64(0)
    m = -np.inf
    s = 0.0
    depth = 0
    ei_stack[0] = offsets[order[0]]
    while depth >= 0:
        w = order[depth]
        ei = ei_stack[depth]
        descended = False
        while ei < offsets[w + 1]:
            b = blk[ei]
            bit = np.uint64(1) << np.uint64(b)
            if not (used & bit):
                lw = lw_stack[depth] + lwt[ei]
                if depth == nw - 1:
                    if lw <= m:
                        s += np.exp(lw - m)
                    else:
                        s = s * np.exp(m - lw) + 1.0
                        m = lw
                else:
                    ei_stack[depth] = ei + 1
                    taken[depth] = bit
                    used |= bit
                    depth += 1
                    lw_stack[depth] = lw
                    ei_stack[depth] = offsets[order[depth]]
                    descended = True
                    break
            ei += 1
        if descended:
            continue
        ei_stack[depth] = ei
        depth -= 1
        if depth >= 0:
            used &= ~taken[depth]
    if s == 0.0 and m == -np.inf:
        return -np.inf
    return m + np.log(s)


@njit(cache=True, parallel=True)
def xmid_lg_seeded(n: int, alpha: float, beta: float, seeds: np.ndarray) -> np.ndarray:
    """x_mid per environment for the inverse-Gamma point-weight polymer."""
    reps = seeds.shape[0]
    out = np.empty(reps, dtype=np.int64)
    for r in prange(reps):
        state = np.empty(1, dtype=np.uint64)
        state[0] = seeds[r]
        lz = np.empty((n + 1, n + 1))
        lz[0, 0] = 0.0
        for i in range(1, n + 1):
            lz[i, 0] = lz[i - 1, 0] - _log_gamma_draw1(beta, state)
        for j in range(1, n + 1):
            lz[0, j] = lz[0, j - 1] - _log_gamma_draw1(alpha, state)
        ab = alpha + beta
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                ly = -_log_gamma_draw1(ab, state)
                lz[i, j] = ly + _logaddexp(lz[i - 1, j], lz[i, j - 1])
        i = n
        j = n
        while i + j > n:
            if i == 0:
                j -= 1
            elif j == 0:
                i -= 1
            else:
                d = lz[i, j - 1] - lz[i - 1, j]
                if d > 700.0:
                    d = 700.0
                elif d < -700.0:
                    d = -700.0
                if _u01(state) < 1.0 / (1.0 + np.exp(d)):
                    i -= 1
                else:
                    j -= 1
        out[r] = i
    return out


@njit(cache=True, parallel=True)
def xmid_sw_seeded(n: int, alpha: float, beta: float, seeds: np.ndarray) -> np.ndarray:
    """x_mid per environment for the Gamma edge-weight polymer.

    Horizontal weights are stored alongside the table since the backward
    walk needs them again.
    """
    reps = seeds.shape[0]
    out = np.empty(reps, dtype=np.int64)
    for r in prange(reps):
        state = np.empty(1, dtype=np.uint64)
        state[0] = seeds[r]
        ly = np.empty((n, n + 1))
        for i in range(n):
            ly[i, 0] = _log_gamma_draw1(alpha + beta, state)
            for j in range(1, n + 1):
                ly[i, j] = _log_gamma_draw1(alpha, state)
        lz = np.empty((n + 1, n + 1))
        lz[0, 0] = 0.0
        for i in range(1, n + 1):
            lz[i, 0] = lz[i - 1, 0] + ly[i - 1, 0]
        for j in range(1, n + 1):
            lb = _log_gamma_draw1(beta, state)
            la = _log_gamma_draw1(alpha, state)
            lz[0, j] = lz[0, j - 1] + _logaddexp(lb, la) - lb
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                lz[i, j] = _logaddexp(ly[i - 1, j] + lz[i - 1, j], lz[i, j - 1])
        i = n
        j = n
        while i + j > n:
            if i == 0:
                j -= 1
            elif j == 0:
                i -= 1
            else:
                lh = ly[i - 1, j] + lz[i - 1, j]
                d = lz[i, j - 1] - lh
                if d > 700.0:
                    d = 700.0
                elif d < -700.0:
                    d = -700.0
                if _u01(state) < 1.0 / (1.0 + np.exp(d)):
                    i -= 1
                else:
                    j -= 1
        out[r] = i
    return out
