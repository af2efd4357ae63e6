"""Classical query algorithms for order-finding.

Every solver talks to its oracle through ``oracle.query(x, y)`` plus the
``n``, ``m`` and ``queries`` attributes, so the same code runs against a
real :class:`~orderfind.oracle.BlackBoxOracle`, a lazy sampler, or the
evasive adversary.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import BudgetExhausted, ConfigError, InconsistencyError
from .numbertheory import prime_factors

#: choose_split searches every x < 2^m up to this m, then switches to a greedy product.
EXHAUSTIVE_M = 20


@dataclass(frozen=True)
class SolverResult:
    reported: int | None
    queries_used: int

    @property
    def failed(self) -> bool:
        return self.reported is None


class QueryBudget:
    """Wraps an oracle and raises BudgetExhausted after ``limit`` queries."""

    def __init__(self, oracle, limit: int):
        self.oracle = oracle
        self.limit = limit
        self.n, self.m = oracle.n, oracle.m

    @property
    def queries(self) -> int:
        return self.oracle.queries

    def query(self, x: int, y: int) -> int:
        if self.oracle.queries >= self.limit:
            raise BudgetExhausted(f"query budget of {self.limit} spent")
        return self.oracle.query(x, y)


def scan_solver(oracle, y0: int) -> SolverResult:
    """Query x = 1, 2, ... until pi^x(y0) returns to y0."""
    start = oracle.queries
    for x in range(1, 1 << oracle.m):
        if oracle.query(x, y0) == y0:
            return SolverResult(x, oracle.queries - start)
    return SolverResult(None, oracle.queries - start)


def _as_sorted(candidates) -> np.ndarray:
    return np.sort(np.fromiter(candidates, dtype=np.int64) if not isinstance(candidates, np.ndarray) else candidates)


def _divides_mask(x: int, cands: np.ndarray) -> np.ndarray:
    if x < 1 << 62:
        return np.int64(x) % cands == 0
    return np.fromiter((x % int(c) == 0 for c in cands), dtype=bool, count=len(cands))


def _divisor_counts(cands: np.ndarray, m: int) -> np.ndarray:
    """counts[x] = number of candidates dividing x, for every x < 2^m."""
    counts = np.zeros(1 << m, dtype=np.int32)
    for c in cands.tolist():
        counts[::c] += 1
    return counts


def optimal_splits(candidates, m: int) -> tuple[int, np.ndarray]:
    """Best achievable balance and every x < 2^m achieving it (exhaustive)."""
    cands = _as_sorted(candidates)
    counts = _divisor_counts(cands, m)
    balance = np.minimum(counts, len(cands) - counts)
    best = int(balance.max())
    return best, np.flatnonzero(balance == best)


def _greedy_split(cands: np.ndarray, m: int) -> int:
    limit = 1 << m
    half = len(cands) // 2
    x, taken = 1, 0
    for start in range(0, len(cands), 256):
        for c in cands[start : start + 256].tolist():
            if c >= limit:
                return x
            nxt = x * c // math.gcd(x, c)
            if nxt < limit:
                x = nxt
                taken += 1
                if taken >= half:
                    return x
            elif 2 * x >= limit:
                return x
    return x


def choose_split(candidates, m: int) -> int:
    """The query exponent x < 2^m that splits the candidate orders most evenly.

    Exhaustive for m <= EXHAUSTIVE_M with ties going to the smallest x;
    above that a greedy lcm of the smallest candidates, capped below 2^m.
    """
    return _split_sorted(_as_sorted(candidates), m)


def _split_sorted(cands: np.ndarray, m: int) -> int:
    if len(cands) < 2:
        raise ConfigError("need at least two candidates to split")
    if m <= EXHAUSTIVE_M:
        counts = _divisor_counts(cands, m)
        balance = np.minimum(counts, len(cands) - counts)
        return int(np.argmax(balance))
    return _greedy_split(cands, m)


def prune(candidates, x: int, collided: bool) -> list[int]:
    """Keep the candidates dividing x on a collision, the rest otherwise."""
    cands = _as_sorted(candidates)
    mask = _divides_mask(x, cands)
    return cands[mask if collided else ~mask].tolist()


def splitting_solver(oracle, y0: int, n: int | None = None, m: int | None = None, *, on_step=None) -> SolverResult:
    """Repeatedly query the most balanced divisor split until one order is left.

    ``on_step(x, collided, candidates)`` is called after every query.
    """
    n = oracle.n if n is None else n
    m = oracle.m if m is None else m
    if m < n:
        raise ConfigError(f"splitting needs m >= n, got n={n}, m={m}")
    start = oracle.queries
    cands = np.arange(1, (1 << n) + 1, dtype=np.int64)
    while len(cands) > 1:
        x = _split_sorted(cands, m)  # cands stays sorted under masking
        mask = _divides_mask(x, cands)
        if mask.all() or not mask.any():
            raise ConfigError(f"no exponent below 2^{m} separates {cands.tolist()}")
        collided = oracle.query(x, y0) == y0
        cands = cands[mask if collided else ~mask]
        if on_step is not None:
            on_step(x, collided, cands)
        if len(cands) == 0:
            raise InconsistencyError("no candidate order is consistent with the answers")
    return SolverResult(int(cands[0]), oracle.queries - start)


def birthday_solver(oracle, y0: int, k: int, seed: int) -> SolverResult:
    """Sample k exponents below 2^(n+1) and report the least positive gap
    between two exponents that land on the same element."""
    n, m = oracle.n, oracle.m
    if m < n + 1:
        raise ConfigError(f"birthday sampling needs m >= n+1, got n={n}, m={m}")
    if k < 2:
        raise ConfigError(f"need at least two samples, got k={k}")
    rng = random.Random(seed)
    start = oracle.queries
    xs = [rng.randrange(1 << (n + 1)) for _ in range(k)]
    groups: dict[int, list[int]] = {}
    for x in xs:
        groups.setdefault(oracle.query(x, y0), []).append(x)
    best = None
    for members in groups.values():
        members = sorted(set(members))
        for a, b in zip(members, members[1:]):
            if best is None or b - a < best:
                best = b - a
    return SolverResult(best, oracle.queries - start)


def verify_order(oracle, y0: int, candidate: int) -> bool:
    """True iff candidate is exactly ord(y0): it returns y0, no maximal divisor does."""
    if candidate < 1:
        raise ConfigError(f"candidate must be positive, got {candidate}")
    if candidate >= 1 << oracle.m:
        raise ConfigError(f"candidate {candidate} is not a valid exponent")
    if oracle.query(candidate, y0) != y0:
        return False
    return all(oracle.query(candidate // p, y0) != y0 for p in prime_factors(candidate))


def gametree_depth(n: int, m: int) -> int:
    """Worst-case number of splitting queries over every order in 1..2^n."""
    if n < 1 or (1 << n) > 64:
        raise ConfigError(f"game tree evaluation needs 2^n <= 64, got n={n}")
    if m < n:
        raise ConfigError(f"need m >= n, got n={n}, m={m}")

    @lru_cache(maxsize=None)
    def depth(cands: tuple[int, ...]) -> int:
        if len(cands) <= 1:
            return 0
        x = choose_split(cands, m)
        hit = tuple(c for c in cands if x % c == 0)
        miss = tuple(c for c in cands if x % c)
        if not hit or not miss:
            raise ConfigError(f"no exponent below 2^{m} separates {list(cands)}")
        return 1 + max(depth(hit), depth(miss))

    return depth(tuple(range(1, (1 << n) + 1)))
