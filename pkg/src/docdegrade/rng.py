"""Deterministic random draws for the degradation pipeline.

Every stochastic operation pulls from a single SplitMix64 stream, so a
(seed, call sequence) pair fully determines the output raster.  Integer
draws are pure 64-bit arithmetic and portable bit-for-bit; normal draws
go through Box-Muller on top of the same stream and are deterministic
for a given numpy build.

Draw protocol (part of the package contract, relied on by replay tests):

* ``uniform_u64`` consumes exactly one SplitMix64 step.
* ``normal`` consumes exactly two steps: u1 from the first, u2 from the
  second, z = sqrt(-2 ln u1) * cos(2 pi u2).  u1 is mapped into (0, 1]
  so the log is always finite; u2 into [0, 1).  Both keep the top 53
  bits of the draw.
* ``uniform_below(bound)`` is one step reduced modulo ``bound`` (the
  modulo bias is below 2**-50 for any page-scale bound).
* block variants consume the same draws as the equivalent sequence of
  scalar calls and return identical values.
"""

import numpy as np

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

_INV_2_53 = 2.0 ** -53


class Rng:
    """SplitMix64 stream with Box-Muller normals on top."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & _MASK

    def uniform_u64(self) -> int:
        """Next 64-bit output of the stream."""
        self.state = (self.state + _GAMMA) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK
        return z ^ (z >> 31)

    def u64_block(self, n: int) -> np.ndarray:
        """The next ``n`` outputs as a uint64 array, advancing the state
        ``n`` steps.  The stream advance is a constant increment, so the
        whole block vectorizes without changing the sequence."""
        if n < 0:
            raise ValueError("block size must be non-negative")
        if n == 0:
            return np.empty(0, dtype=np.uint64)
        steps = np.arange(1, n + 1, dtype=np.uint64)
        z = np.uint64(self.state) + np.uint64(_GAMMA) * steps
        self.state = int(z[-1])
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
        return z ^ (z >> np.uint64(31))

    def uniform_below(self, bound: int) -> int:
        """One draw reduced into [0, bound)."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        return self.uniform_u64() % bound

    def uniform_below_block(self, n: int, bound: int) -> np.ndarray:
        if bound <= 0:
            raise ValueError("bound must be positive")
        return (self.u64_block(n) % np.uint64(bound)).astype(np.int64)

    def normal_block(self, n: int, mean: float, sd: float) -> np.ndarray:
        """``n`` normal draws, consuming ``2 n`` stream steps."""
        bits = self.u64_block(2 * n)
        if n == 0:
            return np.empty(0, dtype=np.float64)
        u1 = ((bits[0::2] >> np.uint64(11)) + np.uint64(1)).astype(np.float64) * _INV_2_53
        u2 = (bits[1::2] >> np.uint64(11)).astype(np.float64) * _INV_2_53
        z = np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)
        return mean + sd * z

    def normal(self, mean: float, sd: float) -> float:
        """One normal draw.  Routed through the block path so scalar and
        batched callers see identical floating-point results."""
        return float(self.normal_block(1, mean, sd)[0])


def uniform_u64(rng: Rng) -> int:
    return rng.uniform_u64()


def normal(rng: Rng, mean: float, sd: float) -> float:
    return rng.normal(mean, sd)


def round_half_away(values):
    """Round to the nearest integer, halves away from zero.

    This is the rounding rule for every draw-to-pixel conversion in the
    package (blob offsets, copy-noise depths, fractional pixel budgets).
    Accepts scalars or arrays; returns float64 of the same shape.
    """
    v = np.asarray(values, dtype=np.float64)
    return np.sign(v) * np.floor(np.abs(v) + 0.5)
