"""Black-box permutation oracles answering (x, y) -> pi^x(y).

Three permutation flavors live here, all evaluating arbitrary powers in O(1):

* :class:`TwoCyclePermutation` -- an r-cycle and an s-cycle laid out in one
  array ``A``, with pi^x(A_i) = A_{(i+x) mod r} for i < r and
  A_{((i-r+x) mod s) + r} otherwise.
* :class:`CycleIndexedPermutation` -- any permutation, indexed by cycle.
* :class:`ModularPermutation` -- y -> a*y mod N below N, identity above.

Solvers only ever see a :class:`BlackBoxOracle`, which counts and records
queries. The structural :func:`order_of` is the trusted verification path and
never touches the counter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, InconsistencyError
from .numbertheory import prime_factors

MAX_N = 26
MAX_WIDTH = 120


@dataclass(frozen=True)
class OracleParams:
    n: int
    m: int
    y0: int = 0

    def __post_init__(self):
        validate_nm(self.n, self.m)
        if not 0 <= self.y0 < (1 << self.n):
            raise ConfigError(f"y0={self.y0} outside 0..2^{self.n}-1")


def validate_nm(n: int, m: int) -> None:
    if not 1 <= n <= MAX_N:
        raise ConfigError(f"n must be in 1..{MAX_N}, got {n}")
    if m < n:
        raise ConfigError(f"need m >= n, got n={n}, m={m}")
    if n + m > MAX_WIDTH:
        raise ConfigError(f"n + m must not exceed {MAX_WIDTH}, got {n + m}")


class TwoCyclePermutation:
    """One r-cycle on ``A[:r]`` and one s-cycle on ``A[r:]``, s = 2^n - r."""

    def __init__(self, array, r: int):
        A = np.asarray(array, dtype=np.int64)
        size = len(A)
        if size == 0 or size & (size - 1):
            raise ConfigError("array length must be a power of two")
        if not 1 <= r <= size:
            raise ConfigError(f"r must be in 1..{size}, got {r}")
        pos = np.full(size, -1, dtype=np.int64)
        if A.min() < 0 or A.max() >= size:
            raise ConfigError("array entries must lie in 0..2^n-1")
        pos[A] = np.arange(size, dtype=np.int64)
        if (pos < 0).any():
            raise ConfigError("array is not a permutation")
        self.A = A
        self.pos = pos
        self.r = int(r)
        self.s = size - self.r
        self.n = size.bit_length() - 1

    @property
    def size(self) -> int:
        return len(self.A)

    def index_step(self, i: int, x: int) -> int:
        """Array index reached from index i after x applications."""
        r = self.r
        if i < r:
            return (i + x) % r
        return (i - r + x) % self.s + r

    def power(self, x: int, y: int) -> int:
        return int(self.A[self.index_step(int(self.pos[y]), x)])

    def order_of(self, y: int) -> int:
        return self.r if self.pos[y] < self.r else self.s

    def in_r_cycle(self, y: int) -> bool:
        return bool(self.pos[y] < self.r)

    def mapping(self) -> list[int]:
        """pi as a list: mapping()[y] == pi(y)."""
        return [self.power(1, y) for y in range(self.size)]


class CycleIndexedPermutation:
    """An arbitrary permutation stored as its cycles."""

    def __init__(self, mapping):
        mapping = [int(v) for v in mapping]
        size = len(mapping)
        if sorted(mapping) != list(range(size)):
            raise ConfigError("mapping is not a permutation")
        self.cycle_id = [-1] * size
        self.position = [0] * size
        self.cycles: list[list[int]] = []
        for start in range(size):
            if self.cycle_id[start] >= 0:
                continue
            cid = len(self.cycles)
            cycle = []
            y = start
            while self.cycle_id[y] < 0:
                self.cycle_id[y] = cid
                self.position[y] = len(cycle)
                cycle.append(y)
                y = mapping[y]
            self.cycles.append(cycle)
        self.size = size
        self.n = max(size - 1, 1).bit_length()

    def power(self, x: int, y: int) -> int:
        cycle = self.cycles[self.cycle_id[y]]
        return cycle[(self.position[y] + x) % len(cycle)]

    def order_of(self, y: int) -> int:
        return len(self.cycles[self.cycle_id[y]])


def multiplicative_order(a: int, N: int) -> int:
    """Least r > 0 with a^r = 1 (mod N), for gcd(a, N) = 1."""
    if N == 1:
        return 1
    phi = N
    for p in prime_factors(N):
        phi -= phi // p
    r = phi
    for p in prime_factors(phi):
        while r % p == 0 and pow(a, r // p, N) == 1:
            r //= p
    return r


class ModularPermutation:
    """pi(y) = a*y mod N for y < N, pi(y) = y for N <= y < 2^n."""

    def __init__(self, N: int, a: int, n: int):
        if not 0 < a < N < (1 << n):
            raise ConfigError(f"need 0 < a < N < 2^n, got a={a}, N={N}, n={n}")
        if math.gcd(a, N) != 1:
            raise ConfigError(f"gcd({a}, {N}) != 1, so y -> a*y mod N is not a permutation")
        self.N, self.a, self.n = N, a, n
        self.size = 1 << n

    def power(self, x: int, y: int) -> int:
        if y >= self.N:
            return y
        return pow(self.a, x, self.N) * y % self.N

    def order_of(self, y: int) -> int:
        if y >= self.N:
            return 1
        # a^r * y = y (mod N)  <=>  a^r = 1 (mod N / gcd(y, N))
        return multiplicative_order(self.a, self.N // math.gcd(y, self.N))


@dataclass
class QueryTranscript:
    entries: list[tuple[int, int, int]] = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.entries)

    def append(self, x: int, y: int, response: int) -> None:
        self.entries.append((x, y, response))

    def replay(self, perm) -> bool:
        """True iff ``perm`` reproduces every recorded response."""
        return all(perm.power(x, y) == resp for x, y, resp in self.entries)


class BlackBoxOracle:
    """Query-counting front end to a permutation; the only handle solvers get."""

    def __init__(self, perm, m: int, *, record: bool = True):
        n = perm.n
        validate_nm(n, m)
        self._perm = perm
        self.n = n
        self.m = m
        self.queries = 0
        self.record = record
        self.transcript = QueryTranscript()

    def query(self, x: int, y: int) -> int:
        if not 0 <= x < (1 << self.m):
            raise ConfigError(f"x={x} outside 0..2^{self.m}-1")
        if not 0 <= y < (1 << self.n):
            raise ConfigError(f"y={y} outside 0..2^{self.n}-1")
        response = self._perm.power(x, y)
        self.queries += 1
        if self.record:
            self.transcript.append(x, y, response)
        return response


def trusted(oracle):
    """The permutation behind an oracle. Test and harness code only."""
    return oracle._perm if isinstance(oracle, BlackBoxOracle) else oracle


def order_of(oracle, y: int) -> int:
    """Exact order of y from the cycle structure (does not count as a query)."""
    return trusted(oracle).order_of(y)


def build_two_cycle(n: int, r: int, rng_seed: int) -> TwoCyclePermutation:
    """Random two-cycle permutation: a uniformly shuffled array split at r."""
    if not 1 <= n <= MAX_N:
        raise ConfigError(f"n must be in 1..{MAX_N}, got {n}")
    if not 1 <= r <= (1 << n):
        raise ConfigError(f"r must be in 1..2^{n}, got {r}")
    rng = np.random.default_rng(rng_seed)
    return TwoCyclePermutation(rng.permutation(1 << n), r)


def build_modular(N: int, a: int, n: int, m: int | None = None) -> BlackBoxOracle:
    return BlackBoxOracle(ModularPermutation(N, a, n), 2 * n if m is None else m)


def dump_permutation(perm: TwoCyclePermutation, seed: int | None = None) -> str:
    """Text export: ``"n r seed"`` then the array on one line (seed -1 if unknown)."""
    head = f"{perm.n} {perm.r} {-1 if seed is None else seed}"
    return head + "\n" + " ".join(map(str, perm.A.tolist())) + "\n"


def load_permutation(text: str) -> tuple[TwoCyclePermutation, int | None]:
    lines = text.strip().splitlines()
    if len(lines) < 2:
        raise ConfigError("permutation file needs a header line and an array line")
    n, r, seed = (int(t) for t in lines[0].split())
    A = [int(t) for t in lines[1].split()]
    if len(A) != 1 << n:
        raise ConfigError(f"expected {1 << n} entries, found {len(A)}")
    perm = TwoCyclePermutation(A, r)
    return perm, (None if seed < 0 else seed)


def save_permutation(path, perm: TwoCyclePermutation, seed: int | None = None) -> None:
    Path(path).write_text(dump_permutation(perm, seed))


def read_permutation(path) -> tuple[TwoCyclePermutation, int | None]:
    return load_permutation(Path(path).read_text())


def check_replay(transcript: QueryTranscript, perm) -> None:
    if not transcript.replay(perm):
        raise InconsistencyError("transcript does not replay against the permutation")
