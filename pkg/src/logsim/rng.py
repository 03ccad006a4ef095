"""Portable counter-based random number generator.

The generator is a splitmix64 counter stream: draw ``i`` of a stream seeded
with ``s`` is ``mix64(s + (i+1) * GOLDEN)`` where ``mix64`` is the splitmix64
finalizer. Because each draw is a pure function of ``(seed, counter)``, the
stream is reproducible on any platform and in any language with 64-bit
integer arithmetic, and child streams can be split off deterministically
(see ``spawn``). Floating-point transforms on top of the integer stream
(``uniform``, ``normal``, ...) use IEEE-754 doubles.

Seeds, tags, and counters are all taken modulo 2**64.
"""

from __future__ import annotations

import math

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_SPLIT = 0xD1B54A32D192ED03
_TWO53 = float(1 << 53)


def mix64(z: int) -> int:
    """splitmix64 finalizer: avalanching 64-bit mix."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


class Rng:
    """Deterministic stream of pseudo-random draws."""

    __slots__ = ("seed", "counter")

    def __init__(self, seed: int, counter: int = 0):
        self.seed = seed & _MASK
        self.counter = counter

    def next_u64(self) -> int:
        self.counter += 1
        return mix64((self.seed + self.counter * _GOLDEN) & _MASK)

    def uniform(self) -> float:
        """Uniform double in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) / _TWO53

    def normal(self) -> float:
        """Standard normal via Box-Muller; consumes exactly two draws."""
        u1 = 1.0 - self.uniform()  # (0, 1]: keeps log() finite
        u2 = self.uniform()
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)

    def choice_index(self, weights) -> int:
        """Sample an index proportionally to non-negative weights."""
        total = float(sum(weights))
        if total <= 0.0:
            raise ValueError("weights must have positive sum")
        u = self.uniform() * total
        acc = 0.0
        for i, w in enumerate(weights):
            acc += w
            if u < acc:
                return i
        return len(weights) - 1

    def spawn(self, tag: int) -> "Rng":
        """Derive an independent child stream identified by ``tag``."""
        child_seed = mix64((mix64(self.seed ^ _GOLDEN) + (tag + 1) * _SPLIT) & _MASK)
        return Rng(child_seed)
