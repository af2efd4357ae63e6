"""Hard input distribution, sampled lazily.

A permutation is drawn by choosing r uniformly from a prime window and laying
a uniformly shuffled array ``A`` out as an r-cycle followed by an s-cycle
(s = 2^n - r). :class:`LazySampler` materializes ``A`` only where queries
touch it, using two independent lazily shuffled lists: ``V`` (new values)
and ``I`` (new indices). All randomness comes from one ``random.Random``
seeded with the trial seed, so a seed determines r, V and I.

With ``instrument=True`` the sampler also maintains the principal-path chain
and counts the two failure events:

* event A -- a new head/external index lands above the window floor, so it
  may fall outside the r-cycle;
* event B -- an external element would be placed at an offset the chain
  already occupies.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .chain import Chain
from .errors import ConfigError, EmptyWindowError
from .numbertheory import PrimeWindow
from .oracle import TwoCyclePermutation


class LazyShuffle:
    """A uniformly random permutation of range(size), revealed one item at a time.

    Fisher-Yates with the swaps kept in a dict, so memory is O(accesses).
    """

    __slots__ = ("size", "cursor", "_rng", "_swapped")

    def __init__(self, size: int, rng: random.Random):
        self.size = size
        self.cursor = 0
        self._rng = rng
        self._swapped: dict[int, int] = {}

    def next(self) -> int:
        c = self.cursor
        if c >= self.size:
            raise IndexError("lazy shuffle exhausted")
        j = c + self._rng.randrange(self.size - c)
        sw = self._swapped
        picked = sw.get(j, j)
        if j != c:
            sw[j] = sw.get(c, c)
        sw.pop(c, None)
        self.cursor = c + 1
        return picked


@dataclass
class FailureRecord:
    event_a_count: int = 0
    event_b_count: int = 0

    @property
    def failed(self) -> bool:
        return self.event_a_count > 0 or self.event_b_count > 0


class LazySampler:
    def __init__(self, n: int, m: int, window: PrimeWindow, seed: int, *, instrument: bool = False):
        if not window.primes:
            raise EmptyWindowError("cannot draw r from an empty window")
        self.n, self.m = n, m
        self.size = 1 << n
        if window.hi > self.size:
            raise ConfigError(f"window reaches {window.hi} > 2^{n}")
        self.seed = seed
        self.rng = random.Random(seed)
        self.r = window.primes[self.rng.randrange(len(window))]
        self.s = self.size - self.r
        self.V = LazyShuffle(self.size, self.rng)
        self.I = LazyShuffle(self.size, self.rng)
        self.A_fwd: dict[int, int] = {}
        self.A_inv: dict[int, int] = {}
        self.queries = 0
        # instrumentation
        self.instrument = instrument
        self.floor = window.lo
        self.chain: Chain | None = None
        self.failures = FailureRecord()
        self.off_path = False
        self.collisions = 0
        self._first_index: int | None = None

    def index_step(self, i: int, x: int) -> int:
        r = self.r
        if i < r:
            return (i + x) % r
        return (i - r + x) % self.s + r

    def query(self, x: int, y: int) -> int:
        if not 0 <= x < (1 << self.m):
            raise ConfigError(f"x={x} outside 0..2^{self.m}-1")
        if not 0 <= y < self.size:
            raise ConfigError(f"y={y} outside 0..2^{self.n}-1")
        fwd, inv = self.A_fwd, self.A_inv
        self._first_index = None
        # stage 1: locate y, inserting it at the next free index from I
        i = inv.get(y)
        if i is None:
            while True:
                i = self.I.next()
                if self._first_index is None:
                    self._first_index = i
                if i not in fwd:
                    break
            fwd[i] = y
            inv[y] = i
        # stage 2: the target slot, filled from V with a value not yet in A
        j = self.index_step(i, x)
        v = fwd.get(j)
        if v is None:
            while True:
                v = self.V.next()
                if v not in inv:
                    break
            fwd[j] = v
            inv[v] = j
        self.queries += 1
        if is_collision(x, y, v):
            self.collisions += 1
        if self.instrument:
            self.track_chain(x, y, v)
        return v

    def track_chain(self, x: int, y: int, response: int) -> None:
        """Advance the principal-path chain after answering pi^x(y) = response."""
        if self.failures.failed or self.off_path:
            return
        chain = self.chain
        if chain is None:
            i0 = self._first_index
            if i0 > self.floor:
                self.failures.event_a_count += 1
                return
            chain = self.chain = Chain(self.m)
            chain.start(y)
            chain.head_location = i0
        elif y not in chain:
            i2 = self._first_index
            if i2 is None:
                # y was placed in A outside the chain's knowledge
                self.off_path = True
                return
            if i2 > self.floor:
                self.failures.event_a_count += 1
                return
            delta = chain.head_location - i2
            if delta > 0:
                chain.prepend(y, delta)
                chain.head_location = i2
            elif chain.value_at(-delta) is not None:
                self.failures.event_b_count += 1
                return
            else:
                chain.insert_at(chain.values[0], -delta, y)
            if self.A_inv[y] != i2:
                # I's next index was already taken: the chain position is wrong
                self.off_path = True
                return
        known = chain.lookup(y, x)
        if known is not None:
            if known != response:
                self.off_path = True
        elif response in chain:
            self.off_path = True
        else:
            chain.insert_at(y, x, response)

    def in_r_cycle(self, y: int) -> bool | None:
        """Whether y sits on the r-cycle, or None if y has no index yet."""
        i = self.A_inv.get(y)
        return None if i is None else i < self.r


def is_collision(x: int, y: int, response: int) -> bool:
    return x > 0 and response == y


def eager_build(state_seed: int, n: int, window: PrimeWindow) -> TwoCyclePermutation:
    """Fully materialized draw from the same distribution as :class:`LazySampler`."""
    if not window.primes:
        raise EmptyWindowError("cannot draw r from an empty window")
    rng = random.Random(state_seed)
    r = window.primes[rng.randrange(len(window))]
    A = list(range(1 << n))
    rng.shuffle(A)
    return TwoCyclePermutation(np.asarray(A, dtype=np.int64), r)


def failure_bound(t: int, n: int):
    """t * 2^(-n/3) + t^2 / (2^n - 2^(2n/3)); exact when 3 | n, float otherwise."""
    if t < 0:
        raise ConfigError(f"t must be non-negative, got {t}")
    if n % 3 == 0:
        k = n // 3
        return Fraction(t, 1 << k) + Fraction(t * t, (1 << n) - (1 << 2 * k))
    return t * 2.0 ** (-n / 3) + t * t / (2.0**n - 2.0 ** (2 * n / 3))


def consistency_probability_bound(k: int, n: int, m: int, window_size: int) -> Fraction:
    """1 - C(k,2) * floor((m+n)/(n-1)) / window_size."""
    if k < 1 or window_size < 1:
        raise ConfigError("need k >= 1 and a nonempty window")
    return 1 - Fraction(k * (k - 1) // 2 * ((m + n) // (n - 1)), window_size)


def randomized_threshold(n: int, m: int, window_size: int) -> int:
    """Smallest chain length k whose consistency bound drops below 2/3."""
    per_pair = (m + n) // (n - 1)
    # 1 - C(k,2)*per_pair/W < 2/3  <=>  3*C(k,2)*per_pair > W
    k = 1
    while 3 * (k * (k - 1) // 2) * per_pair <= window_size:
        k += 1
    return k


def randomized_threshold_closed_form(n: int, m: int) -> float:
    """sqrt((4/3) * ((n-1)/n) * (beta * 2^(2n/3) / (m+n))) with beta = 1/14."""
    return math.sqrt(4 / 3 * (n - 1) / n * (2 ** (2 * n / 3) / 14) / (m + n))
