"""Seeded random number generation pinned for cross-language reproducibility.

The generator is xoshiro256** with its state filled from SplitMix64, exactly
as recommended by the xoshiro authors.  Derived draws are pinned as follows:

* ``uniform()``: take the top 53 bits of one output word, scale by 2**-53.
* ``below(k)``: one output word modulo ``k`` (the modulo bias is irrelevant
  at the sizes used here and keeps the mapping trivial to reimplement).
* ``subset(n, s)``: partial Fisher-Yates shuffle of ``0..n-1`` consuming one
  ``below`` draw per selected element; the result is returned sorted.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1


def _splitmix64(state: int):
    while True:
        state = (state + 0x9E3779B97F4A7C15) & _MASK
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        yield z ^ (z >> 31)


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK


class SeededRng:
    """xoshiro256** stream seeded from a 64-bit integer via SplitMix64."""

    def __init__(self, seed: int):
        seeder = _splitmix64(int(seed) & _MASK)
        self._s = [next(seeder) for _ in range(4)]

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self._s
        result = (_rotl((s1 * 5) & _MASK, 7) * 9) & _MASK
        t = (s1 << 17) & _MASK
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self._s = [s0, s1, s2, s3]
        return result

    def uniform(self) -> float:
        """One double in [0, 1)."""
        return (self.next_u64() >> 11) * 2.0**-53

    def symmetric_uniform(self) -> float:
        """One double in [-1, 1)."""
        return 2.0 * self.uniform() - 1.0

    def below(self, k: int) -> int:
        if k <= 0:
            raise ValueError("k must be positive")
        return self.next_u64() % k

    def subset(self, n: int, s: int) -> tuple[int, ...]:
        """A uniformly drawn size-``s`` subset of ``range(n)``, sorted."""
        if not 0 <= s <= n:
            raise ValueError("subset size out of range")
        pool = list(range(n))
        for i in range(s):
            j = i + self.below(n - i)
            pool[i], pool[j] = pool[j], pool[i]
        return tuple(sorted(pool[:s]))
