"""Reproducible, stream-splittable random number generation.

All randomness in the package flows through RngStream.  A stream is
identified by a (master seed, stream id) pair; the underlying generator is
seeded from a SplitMix64 mix of the two, so distinct pairs give
statistically independent generators and identical pairs reproduce
bit-identical output.  Replica-parallel code hands each task its own
stream id instead of sharing a generator.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    """One SplitMix64 output step for the 64-bit state ``x``."""
    x = (x + _GOLDEN) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def mix_seed(seed: int, stream_id: int) -> int:
    """Derive the 64-bit generator key for stream ``stream_id`` under ``seed``."""
    if stream_id < 0:
        raise ValueError("stream_id must be nonnegative")
    h = splitmix64(seed & _MASK64)
    h = splitmix64(h ^ ((stream_id & _MASK64) * _GOLDEN & _MASK64))
    return h


class RngStream:
    """A counter-derived random stream backed by a numpy PCG64 generator."""

    def __init__(self, seed: int, stream_id: int = 0):
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        self.generator = np.random.Generator(np.random.PCG64(mix_seed(self.seed, self.stream_id)))

    def stream(self, stream_id: int) -> "RngStream":
        """A sibling stream under the same master seed."""
        return RngStream(self.seed, stream_id)

    def substream(self, tag: int) -> "RngStream":
        """A child stream derived from this stream's identity and ``tag``."""
        return RngStream(mix_seed(self.seed, self.stream_id), tag)

    # Thin pass-throughs used all over; anything fancier should go through
    # randvars so that the small-shape Gamma handling is not bypassed.
    def uniform(self, size=None):
        return self.generator.random(size)

    def standard_normal(self, size=None):
        return self.generator.standard_normal(size)

    def integers(self, low, high=None, size=None):
        return self.generator.integers(low, high, size)

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"
