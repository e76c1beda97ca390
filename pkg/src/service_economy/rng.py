"""Seedable random source for the simulation.

The bit stream is PCG64 (O'Neill's permuted congruential generator, 128-bit
state, XSL-RR output) as shipped by numpy. PCG64 output for a given seed is
fixed by numpy's compatibility policy and does not depend on the platform, so
runs are byte-reproducible across machines. Only the raw 64-bit outputs are
used; the mapping to integers and reals is done here.
"""

from __future__ import annotations

import numpy as np

_U64_MASK = (1 << 64) - 1
_TWO_POW_53_INV = 1.0 / (1 << 53)


class Rng:
    """Generator state owned by exactly one simulation run.

    ``draws`` counts raw 64-bit outputs consumed, so draw sequences can be
    audited between runs.
    """

    __slots__ = ("seed", "draws", "_bits")

    def __init__(self, seed: int) -> None:
        if not 0 <= seed <= _U64_MASK:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
        self.seed = int(seed)
        self.draws = 0
        self._bits = np.random.PCG64(self.seed)

    def next_u64(self) -> int:
        self.draws += 1
        return int(self._bits.random_raw())

    def uniform_int(self, n: int) -> int:
        """Uniform integer on [1, n], like Matlab's ``unidrnd(n)``.

        Rejection on the top of the 64-bit range removes modulo bias.
        """
        if n < 1:
            raise ValueError(f"uniform_int needs n >= 1, got {n}")
        if n == 1:
            self.next_u64()
            return 1
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % n + 1

    def uniform_unit(self) -> float:
        """Uniform real on [0, 1) with 53 bits of resolution."""
        return (self.next_u64() >> 11) * _TWO_POW_53_INV


def rng_new(seed: int) -> Rng:
    return Rng(seed)


def uniform_int(rng: Rng, n: int) -> int:
    return rng.uniform_int(n)


def uniform_unit(rng: Rng) -> float:
    return rng.uniform_unit()
