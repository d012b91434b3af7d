"""Deterministic pseudo-random streams for reproducible simulations.

The generator is SplitMix64: a 64-bit counter advanced by the golden-ratio
increment, finalized with an xor-shift-multiply mix. It is tiny, passes
standard statistical batteries, and produces bit-identical output on every
platform and Python version, so simulation traces are stable forever.
Independent child streams for parallel trials are derived by hashing a
(master seed, index...) path through the same finalizer.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    """SplitMix64 output function: one increment plus finalizer."""
    z = (z + _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(master: int, *path: int) -> int:
    """Derive a child seed from a master seed and an index path.

    Distinct paths give statistically independent streams; the derivation is
    pure arithmetic, so any worker can compute the seed for any trial.
    """
    s = master & _MASK64
    for idx in path:
        s = mix64(s ^ mix64(idx & _MASK64))
    return s


class Rng:
    """A seeded SplitMix64 stream with the few draws the simulators need."""

    __slots__ = ("_state",)

    def __init__(self, seed: int) -> None:
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * 2.0**-53

    def randrange(self, n: int) -> int:
        """Uniform integer in [0, n), unbiased via rejection sampling."""
        if n <= 0:
            raise ValueError("randrange requires n >= 1")
        limit = _MASK64 + 1 - ((_MASK64 + 1) % n)
        while True:
            u = self.next_u64()
            if u < limit:
                return u % n

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle; every permutation equally likely."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randrange(i + 1)
            items[i], items[j] = items[j], items[i]

    def spawn(self, index: int) -> "Rng":
        """A child stream; children with distinct indices are independent."""
        return Rng(derive_seed(self._state, index))
