"""Gamma/Beta random variables, polygamma functions, and the sum/ratio split.

The two distribution families used by every other module:

* ``Gamma(shape, scale)`` with density x^(shape-1) exp(-x/scale) / (Gamma(shape) scale^shape)
  on the positive reals,
* ``Beta(alpha, beta)`` with density x^(alpha-1) (1-x)^(beta-1) / B(alpha, beta) on [0,1].

For independent X ~ Gamma(x, s), Y ~ Gamma(y, s) the pair
(X+Y, X/(X+Y)) is distributed Gamma(x+y, s) x Beta(x, y) with the two
coordinates independent, and this splitting property characterizes the
Gamma family.  ``lukacs_merge`` / ``lukacs_split`` implement the two
directions of that change of variables; they are each other's inverse as
deterministic maps.

Shapes below 1 are sampled in log space (shape-boosted) so that draws
never round to zero; downstream quotients a/(a+b) rely on this.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .rng import RngStream


@dataclass(frozen=True)
class GammaParams:
    shape: float
    scale: float = 1.0

    def __post_init__(self):
        if not (self.shape > 0 and math.isfinite(self.shape)):
            raise ValueError(f"Gamma shape must be positive, got {self.shape}")
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise ValueError(f"Gamma scale must be positive, got {self.scale}")

    @property
    def mean(self) -> float:
        return self.shape * self.scale

    @property
    def var(self) -> float:
        return self.shape * self.scale**2


@dataclass(frozen=True)
class BetaParams:
    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise ValueError(f"Beta alpha must be positive, got {self.alpha}")
        if not (self.beta > 0 and math.isfinite(self.beta)):
            raise ValueError(f"Beta beta must be positive, got {self.beta}")

    @property
    def mean(self) -> float:
        return self.alpha / (self.alpha + self.beta)


_TINY = np.nextafter(0.0, 1.0)
_ALMOST_ONE = np.nextafter(1.0, 0.0)


def log_gamma_draw(rng: RngStream, shape, size=None):
    """Draw log X for X ~ Gamma(shape, 1), stable for arbitrarily small shapes.

    For shape >= 1 this is log of a direct draw.  For shape < 1 it uses the
    boost G * U^(1/shape) with G ~ Gamma(shape+1, 1): the log is computed
    directly as log G + log(U)/shape, which never underflows.
    """
    shape = np.asarray(shape, dtype=float)
    g = rng.generator
    if size is None:
        size = shape.shape
    small = shape < 1.0
    if not small.any():
        return np.log(g.gamma(np.broadcast_to(shape, size)))
    shape_b = np.broadcast_to(shape, size)
    out = np.empty(size, dtype=float)
    big = ~np.broadcast_to(small, size)
    if big.any():
        out[big] = np.log(g.gamma(shape_b[big]))
    sm = ~big
    if sm.any():
        sh = shape_b[sm]
        boosted = g.gamma(sh + 1.0)
        u = g.random(sh.shape)
        u = np.maximum(u, _TINY)
        out[sm] = np.log(boosted) + np.log(u) / sh
    return out


def sample_gamma(rng: RngStream, p: GammaParams, size=None):
    """Sample Gamma(shape, scale) draws; scalar when ``size`` is None."""
    scalar = size is None
    x = np.exp(log_gamma_draw(rng, p.shape, size=() if scalar else size))
    x = x * p.scale
    return float(x) if scalar else x


def gamma_field(rng: RngStream, shape_grid, size_prefix=()):
    """Positive Gamma(shape, 1) array with per-cell shapes ``shape_grid``.

    ``size_prefix`` prepends replica axes; shapes broadcast across them.
    """
    shape_grid = np.asarray(shape_grid, dtype=float)
    full = tuple(size_prefix) + shape_grid.shape
    return np.exp(log_gamma_draw(rng, np.broadcast_to(shape_grid, full), size=full))


def sample_beta(rng: RngStream, p: BetaParams, size=None):
    """Sample Beta(alpha, beta) strictly inside (0, 1).

    Drawn as X/(X+Y) from two log-space Gamma draws; the result is clamped
    away from the endpoints by one ulp so the open-interval contract holds
    even when the log-scale gap exceeds float precision.
    """
    scalar = size is None
    sz = () if scalar else size
    lx = log_gamma_draw(rng, np.full(sz, p.alpha), size=sz)
    ly = log_gamma_draw(rng, np.full(sz, p.beta), size=sz)
    b = 1.0 / (1.0 + np.exp(ly - lx))
    b = np.clip(b, _TINY, _ALMOST_ONE)
    return float(b) if scalar else b


def beta_field(rng: RngStream, alpha_grid, beta_grid, size_prefix=()):
    """Beta(alpha, beta) array with per-cell parameters, open interval."""
    alpha_grid = np.asarray(alpha_grid, dtype=float)
    beta_grid = np.asarray(beta_grid, dtype=float)
    full = tuple(size_prefix) + np.broadcast_shapes(alpha_grid.shape, beta_grid.shape)
    lx = log_gamma_draw(rng, np.broadcast_to(alpha_grid, full), size=full)
    ly = log_gamma_draw(rng, np.broadcast_to(beta_grid, full), size=full)
    b = 1.0 / (1.0 + np.exp(ly - lx))
    return np.clip(b, _TINY, _ALMOST_ONE)


# --- polygamma ---------------------------------------------------------------
#
# Psi_k(x) = d^(k+1)/dx^(k+1) log Gamma(x).  Evaluated by shifting x upward
# with the recurrence Psi_k(x) = Psi_k(x+1) - (-1)^k k!/x^(k+1) until
# x >= 10, then summing the asymptotic (Bernoulli-number) series.  Accurate
# to ~1e-12 relative over x in [1e-3, 1e6], which covers both temperature
# extremes used in the free-energy checks.

_BERNOULLI2 = (
    1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30, 5.0 / 66, -691.0 / 2730, 7.0 / 6,
)
_SHIFT_CUTOFF = 10.0


def _polygamma_asymptotic(k: int, x: float) -> float:
    # Series for Psi_k(x) at large x; derivative order k in {0,1,2,3}.
    inv = 1.0 / x
    inv2 = inv * inv
    if k == 0:
        total = math.log(x) - 0.5 * inv
        term = inv2
        for n, b in enumerate(_BERNOULLI2, start=1):
            total -= b * term / (2 * n)
            term *= inv2
        return total
    if k == 1:
        total = inv + 0.5 * inv2
        term = inv * inv2
        for b in _BERNOULLI2:
            total += b * term
            term *= inv2
        return total
    if k == 2:
        total = -inv2 - inv * inv2
        term = inv2 * inv2
        for n, b in enumerate(_BERNOULLI2, start=1):
            total -= b * (2 * n + 1) * term
            term *= inv2
        return total
    if k == 3:
        total = 2.0 * inv * inv2 + 3.0 * inv2 * inv2
        term = inv * inv2 * inv2
        for n, b in enumerate(_BERNOULLI2, start=1):
            total += b * (2 * n + 1) * (2 * n + 2) * term
            term *= inv2
        return total
    raise ValueError(f"polygamma order {k} not supported (k in 0..3)")


def polygamma(k: int, x) -> float | np.ndarray:
    """Polygamma function Psi_k(x) for k in {0, 1, 2, 3} and x > 0."""
    if k not in (0, 1, 2, 3):
        raise ValueError(f"polygamma order {k} not supported (k in 0..3)")
    xs = np.asarray(x, dtype=float)
    if np.any(xs <= 0):
        raise ValueError("polygamma requires x > 0")

    def _one(xv: float) -> float:
        shift = 0.0
        sign = -1.0 if k % 2 == 0 else 1.0  # -(-1)^k
        kfact = math.factorial(k)
        while xv < _SHIFT_CUTOFF:
            shift += sign * kfact / xv ** (k + 1)
            xv += 1.0
        return _polygamma_asymptotic(k, xv) + shift

    if xs.ndim == 0:
        return _one(float(xs))
    return np.vectorize(_one)(xs)


def digamma(x):
    return polygamma(0, x)


def trigamma(x):
    return polygamma(1, x)


def log_gamma_cumulant(k: int, shape) -> float | np.ndarray:
    """k-th cumulant of log X for X ~ Gamma(shape, s), k >= 2 (scale-free)."""
    if k not in (2, 3, 4):
        raise ValueError(f"log-Gamma cumulant order {k} not supported (k in 2..4)")
    return polygamma(k - 1, shape)


# --- sum/ratio split ----------------------------------------------------------

def lukacs_merge(x: float, y: float) -> tuple[float, float]:
    """Map a positive pair (x, y) to (sum, ratio) = (x+y, x/(x+y))."""
    if not (x > 0 and y > 0):
        raise ValueError("lukacs_merge requires positive inputs")
    s = x + y
    return s, x / s


def lukacs_split(a: float, b: float) -> tuple[float, float]:
    """Inverse of lukacs_merge: (sum, ratio) back to the positive pair."""
    if not a > 0:
        raise ValueError("lukacs_split requires a positive sum")
    if not 0.0 < b < 1.0:
        raise ValueError("lukacs_split requires a ratio strictly inside (0,1)")
    return b * a, (1.0 - b) * a
