"""Seeded, splittable random streams and exact discrete inversion.

Every sampler takes an explicit stream; identical seeds reproduce identical
output bit for bit.  Child streams are derived by hashing the parent seed
with a label, so parallel arms can own independent deterministic streams.

Exact draws refine a dyadic interval until it separates the rational
cumulative weights, so a draw from an exact pmf has exactly the stated law.
"""

from __future__ import annotations

import hashlib
import random
from bisect import bisect_left, bisect_right
from collections.abc import Iterable, Sequence
from fractions import Fraction


class RandomStream:
    """Deterministic random source with hierarchical splitting."""

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._rng = random.Random(self.seed)

    def split(self, *labels) -> RandomStream:
        """Independent child stream; same (seed, labels) always gives the same child."""
        material = repr((self.seed,) + labels).encode()
        digest = hashlib.sha256(material).digest()
        return RandomStream(int.from_bytes(digest[:8], "big"))

    def random(self) -> float:
        return self._rng.random()

    def getrandbits(self, k: int) -> int:
        return self._rng.getrandbits(k)

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n), by rejection on the next power of two."""
        if n <= 0:
            raise ValueError("randbelow needs a positive bound")
        bits = (n - 1).bit_length()
        while True:
            v = self._rng.getrandbits(bits) if bits else 0
            if v < n:
                return v


def draw_cdf(cum: Sequence, stream: RandomStream) -> int:
    """Index i with cum[i-1] <= U < cum[i] for a uniform U, decided exactly.

    Works for Fraction or float cumulative lists; refines U sixteen bits at a
    time until the dyadic interval [num/2^b, (num+1)/2^b) pins the index.
    """
    num = 0
    bits = 0
    while True:
        num = (num << 16) | stream.getrandbits(16)
        bits += 16
        den = 1 << bits
        # smallest index reachable at the interval's low end vs its high end
        i_lo = bisect_right(cum, Fraction(num, den))
        i_hi = bisect_left(cum, Fraction(num + 1, den))
        if i_lo >= i_hi or bits >= 1024:
            return min(i_lo, len(cum) - 1)


def draw_weights(weights: Iterable, total, stream: RandomStream) -> int:
    """Draw an index proportionally to a (possibly infinite) weight sequence.

    `total` is the exact sum of all weights.  Weights are consumed lazily, so
    unbounded supports are fine as long as their tail is light.
    """
    num = stream.getrandbits(64)
    bits = 64
    acc = total * 0
    last_positive = None
    for i, w in enumerate(weights):
        if w == 0:
            continue
        acc += w
        last_positive = i
        # decide whether U*total < acc with U in [num/2^b, (num+1)/2^b)
        while True:
            den = 1 << bits
            if acc * den >= (num + 1) * total:
                return i
            if acc * den <= num * total:
                break  # U is beyond this index; move to the next weight
            num = (num << 16) | stream.getrandbits(16)
            bits += 16
            if bits >= 1024:
                return i
    if last_positive is None:
        raise ValueError("all weights vanish")
    return last_positive
