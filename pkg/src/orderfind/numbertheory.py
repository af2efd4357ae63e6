"""Prime windows, divisibility helpers and the prime-density checks.

The two windows used throughout the package are

* ``set_R(n)``        primes in (2^(n-1), 2^n]
* ``set_R_prime(n)``  primes in (2^n - 2^(2n/3), 2^n]   (n divisible by 3)

Both are produced by :func:`primes_in`, a segmented numpy sieve that falls
back to a deterministic Miller-Rabin scan when the base sieve would be too
large but the interval itself is short.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, NamedTuple

import numpy as np

from .errors import ConfigError, EmptyWindowError, ResourceError

#: Largest number of integers a single sieve array may cover.
SIEVE_BUDGET = 1 << 28
#: Above this span the Miller-Rabin fallback is refused.
SCAN_BUDGET = 1 << 20
#: Upper limit of the ``hi`` argument to :func:`primes_in`.
MAX_HI = 1 << 63

#: Density constants of the two prime-counting lemmas.
ALPHA = Fraction(721, 1000)
BETA = Fraction(1, 14)

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


@dataclass(frozen=True)
class PrimeWindow:
    """All primes p with ``lo < p <= hi``, in increasing order."""

    lo: int
    hi: int
    primes: tuple[int, ...]
    _array: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self._array is None:
            object.__setattr__(self, "_array", np.asarray(self.primes, dtype=np.int64))

    def __len__(self) -> int:
        return len(self.primes)

    def __iter__(self) -> Iterator[int]:
        return iter(self.primes)

    def __contains__(self, p) -> bool:
        i = np.searchsorted(self._array, p)
        return bool(i < len(self.primes) and self.primes[i] == p)

    @property
    def array(self) -> np.ndarray:
        """The primes as a read-only int64 array."""
        return self._array

    def require_nonempty(self) -> "PrimeWindow":
        if not self.primes:
            raise EmptyWindowError(f"no primes in ({self.lo}, {self.hi}]")
        return self


def is_prime(p: int) -> bool:
    """Deterministic primality for 0 <= p < 3.3e24 (strong pseudoprime test)."""
    if p < 2:
        return False
    for q in _MR_BASES:
        if p % q == 0:
            return p == q
    d, s = p - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, p)
        if x == 1 or x == p - 1:
            continue
        for _ in range(s - 1):
            x = x * x % p
            if x == p - 1:
                break
        else:
            return False
    return True


def _small_primes(limit: int) -> np.ndarray:
    """Primes <= limit by a plain sieve of Eratosthenes."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    mark = np.ones(limit + 1, dtype=bool)
    mark[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if mark[p]:
            mark[p * p :: p] = False
    return np.flatnonzero(mark).astype(np.int64)


def _sieve_segment(lo: int, hi: int, base: np.ndarray) -> np.ndarray:
    """Primes in (lo, hi] given all primes up to isqrt(hi)."""
    start = lo + 1
    mark = np.ones(hi - start + 1, dtype=bool)
    for p in base.tolist():
        if p * p > hi:
            break
        first = max(p * p, -(-start // p) * p)
        mark[first - start :: p] = False
    if start <= 1:
        mark[: 2 - start] = False
    return np.flatnonzero(mark).astype(np.int64) + start


def primes_in(lo: int, hi: int) -> PrimeWindow:
    """Return exactly the primes in ``(lo, hi]``.

    Raises :class:`ResourceError` when neither the segmented sieve nor the
    Miller-Rabin scan fits the configured budgets.
    """
    lo, hi = int(lo), int(hi)
    if not 0 <= lo < hi <= MAX_HI:
        raise ConfigError(f"need 0 <= lo < hi <= 2^63, got ({lo}, {hi}]")
    root = math.isqrt(hi)
    if root <= SIEVE_BUDGET and hi - lo <= SIEVE_BUDGET:
        base = _small_primes(root)
        segment = 1 << 22
        parts = []
        a = lo
        while a < hi:
            b = min(a + segment, hi)
            parts.append(_sieve_segment(a, b, base))
            a = b
        found = np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)
        return PrimeWindow(lo, hi, tuple(found.tolist()), found)
    if hi - lo <= SCAN_BUDGET:
        return PrimeWindow(lo, hi, tuple(p for p in range(lo + 1, hi + 1) if is_prime(p)))
    raise ResourceError(f"interval ({lo}, {hi}] exceeds the sieve budget")


def set_R(n: int) -> PrimeWindow:
    """Primes in (2^(n-1), 2^n]."""
    if not 2 <= n <= 30:
        raise ConfigError(f"set_R needs 2 <= n <= 30, got {n}")
    return primes_in(1 << (n - 1), 1 << n)


def r_prime_floor(n: int) -> int:
    """The exclusive lower end 2^n - 2^(2n/3) of the R' window."""
    if n % 3:
        raise ConfigError(f"the R' window needs n divisible by 3, got {n}")
    return (1 << n) - (1 << (2 * n // 3))


def set_R_prime(n: int) -> PrimeWindow:
    """Primes in (2^n - 2^(2n/3), 2^n]; raises EmptyWindowError if there are none."""
    if not 3 <= n <= 30:
        raise ConfigError(f"set_R_prime needs 3 <= n <= 30, got {n}")
    return primes_in(r_prime_floor(n), 1 << n).require_nonempty()


def divisors_in_window(x: int, w: PrimeWindow) -> list[int]:
    """The elements of ``w`` that divide ``x``."""
    if x < 1:
        raise ConfigError(f"x must be positive, got {x}")
    if x < MAX_HI:
        hits = w.array[np.int64(x) % w.array == 0]
        return hits.tolist()
    return [p for p in w.primes if x % p == 0]


def order_divides(x: int, r: int) -> bool:
    """True iff r | x, i.e. pi^x(y) == y for an element y of order r."""
    if r < 1 or x < 0:
        raise ConfigError(f"need r >= 1 and x >= 0, got r={r}, x={x}")
    return x % r == 0


class DensityCheck(NamedTuple):
    count: int
    bound: Fraction
    holds: bool


def check_lemma4(n: int) -> DensityCheck:
    """Compare |set_R(n)| with 0.721 * 2^n / n."""
    count = len(set_R(n))
    bound = ALPHA * (1 << n) / n
    return DensityCheck(count, bound, count >= bound)


def check_lemma7(n: int) -> DensityCheck:
    """Compare |set_R_prime(n)| with (1/14) * 2^(2n/3) / n."""
    if not 3 <= n <= 30:
        raise ConfigError(f"check_lemma7 needs 3 <= n <= 30, got {n}")
    count = len(primes_in(r_prime_floor(n), 1 << n))
    bound = BETA * (1 << (2 * n // 3)) / n
    return DensityCheck(count, bound, count >= bound)


def prime_factors(x: int) -> list[int]:
    """Distinct prime factors of x >= 1 by trial division."""
    if x < 1:
        raise ConfigError(f"x must be positive, got {x}")
    out = []
    p = 2
    while p * p <= x:
        if x % p == 0:
            out.append(p)
            while x % p == 0:
                x //= p
        p += 1 if p == 2 else 2
    if x > 1:
        out.append(x)
    return out
