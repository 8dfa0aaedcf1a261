"""SplitMix64 generator used everywhere randomness is needed.

A tiny fixed-width generator keeps placement and expiration draws
reproducible across platforms and languages; Python's own Mersenne
Twister is deliberately not used for anything that ends up in world
state.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1


class Rng64:
    """SplitMix64: state += golden gamma, then two xor-multiply mixes."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def next_below(self, n: int) -> int:
        """Uniform integer in [0, n) via rejection sampling (no modulo bias)."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = ((1 << 64) // n) * n
        while True:
            z = self.next_u64()
            if z < limit:
                return z % n

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates, descending, j drawn from [0, i]."""
        for i in range(len(items) - 1, 0, -1):
            j = self.next_below(i + 1)
            items[i], items[j] = items[j], items[i]
