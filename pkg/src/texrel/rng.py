"""Deterministic 64-bit random streams used by all sampling code.

A hand-rolled splitmix64 stream is used instead of a library generator so
that the compiled generation kernel can reproduce the exact same draw
sequence, and so per-example streams derived from (master_seed, split,
example_index) are cheap to construct and independent of generation order.
"""
from __future__ import annotations

MASK64 = (1 << 64) - 1

_GAMMA = 0x9E3779B97F4A7C15
_MULT_A = 0xBF58476D1CE4E5B9
_MULT_B = 0x94D049BB133111EB


def _finalize(z: int) -> int:
    z = ((z ^ (z >> 30)) * _MULT_A) & MASK64
    z = ((z ^ (z >> 27)) * _MULT_B) & MASK64
    return z ^ (z >> 31)


def mix(*values: int) -> int:
    """Fold integers into a single 64-bit seed.

    Folding is arity-sensitive, so mix(a, b) and mix(a, b, 0) differ; this
    keeps derived seed domains (texture stream, per-example streams, ...)
    from colliding.
    """
    h = 0
    for v in values:
        h = _finalize(((h ^ (v & MASK64)) + _GAMMA) & MASK64)
    return h


class Stream:
    """splitmix64 sequence; semantics mirrored bit-for-bit in _speedups.pyx."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & MASK64
        return _finalize(self._state)

    def below(self, n: int) -> int:
        """Uniform draw from [0, n).  Modulo bias is < n/2**64, irrelevant
        for the small ranges used here."""
        return self.next_u64() % n

    def chance(self, p: float) -> bool:
        """True with probability p."""
        return self.next_u64() < p * 18446744073709551616.0

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]
