"""Deterministic evasive responder for the order-finding game.

Every answer is recorded in a single :class:`~orderfind.chain.Chain`. A query
on an element outside the chain first prepends that element with a weight-1
link, so the chain always carries at least as much information as the
answers revealed. Previously unknown answers are fresh values, handed out in
increasing numeric order.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .chain import Chain, consistent_orders
from .errors import CapacityError, ConfigError
from .numbertheory import ALPHA, set_R
from .oracle import OracleParams, QueryTranscript, TwoCyclePermutation


class AdversaryState:
    """Plays the oracle against any solver; exposes the same ``query`` surface."""

    def __init__(self, params: OracleParams):
        self.params = params
        self.n, self.m = params.n, params.m
        self.chain = Chain(params.m)
        self.transcript = QueryTranscript()
        self.queries = 0
        self._next_fresh = 0
        self._window = None

    @property
    def window(self):
        if self._window is None:
            self._window = set_R(self.n)
        return self._window

    def _fresh(self) -> int:
        v = self._next_fresh
        while v in self.chain:
            v += 1
        if v >= 1 << self.n:
            raise CapacityError("every value of the domain is already in the chain")
        self._next_fresh = v + 1
        return v

    def respond(self, x: int, y: int) -> int:
        if not 0 <= x < (1 << self.m):
            raise ConfigError(f"x={x} outside 0..2^{self.m}-1")
        if not 0 <= y < (1 << self.n):
            raise ConfigError(f"y={y} outside 0..2^{self.n}-1")
        chain = self.chain
        if not len(chain):
            chain.start(y)
        elif y not in chain:
            chain.prepend(y, 1)
        answer = chain.lookup(y, x)
        if answer is None:
            answer = chain.insert_at(y, x, self._fresh())
        self.queries += 1
        self.transcript.append(x, y, answer)
        return answer

    query = respond

    def remaining_orders(self) -> list[int]:
        if not len(self.chain):
            return list(self.window.primes)
        return consistent_orders(self.chain, self.window)

    def finalize(self, r: int) -> TwoCyclePermutation:
        """A concrete permutation agreeing with every answer, with ord(y0) = r."""
        size = 1 << self.n
        chain = self.chain
        k = len(chain)
        y0 = self.params.y0
        if not 1 <= r <= size:
            raise ConfigError(f"r must be in 1..{size}, got {r}")
        if k + (y0 not in chain) > r:
            raise CapacityError(f"{k} chain nodes plus y0 do not fit on an {r}-cycle")
        slots = [-1] * r
        for v, o in chain.nodes():
            if slots[o % r] >= 0:
                raise ConfigError(f"r={r} is not consistent with the chain")
            slots[o % r] = v
        used = set(chain.values)
        if y0 not in used:
            slots[slots.index(-1)] = y0
            used.add(y0)
        free = np.ones(size, dtype=bool)
        free[list(used)] = False
        rest = np.flatnonzero(free)
        cycle = np.array(slots, dtype=np.int64)
        holes = cycle < 0
        n_holes = int(holes.sum())
        cycle[holes] = rest[:n_holes]
        A = np.concatenate([cycle, rest[n_holes:]])
        return TwoCyclePermutation(A, r)


def evasive_threshold(n: int, m: int) -> int:
    """Largest k with 0.721*2^n/n - (k^2/2)*(m+n)/(n-1) >= 2, exactly.

    Zero when even k = 0 fails (tiny n) or no k >= 1 satisfies it.
    """
    if m < n or n < 2:
        raise ConfigError(f"need 2 <= n <= m, got n={n}, m={m}")
    slack = ALPHA * (1 << n) / n - 2
    if slack < 0:
        return 0
    # k^2 <= slack * 2 * (n-1) / (m+n)
    limit = slack * 2 * (n - 1) / (m + n)
    k = math.isqrt(limit.numerator // limit.denominator)
    while Fraction(k + 1) ** 2 <= limit:
        k += 1
    while k > 0 and Fraction(k) ** 2 > limit:
        k -= 1
    return k
