"""Weighted linked list of known relations pi^w(y_i) = y_{i+1}.

Nodes are stored by offset from the head (prefix sums of the link weights),
so that "is cycle length r consistent with this chain" becomes "are all
offsets distinct modulo r".
"""

from __future__ import annotations

import bisect

import numpy as np

from .errors import ConfigError, InconsistencyError
from .numbertheory import PrimeWindow


class Chain:
    def __init__(self, m: int | None = None):
        self.m = m
        self.offsets: list[int] = []
        self.values: list[int] = []
        self._where: dict[int, int] = {}  # value -> offset
        self._at: dict[int, int] = {}  # offset -> value
        self.head_location: int | None = None

    def __len__(self) -> int:
        return len(self.offsets)

    def __contains__(self, y) -> bool:
        return y in self._where

    def __repr__(self) -> str:
        return f"Chain({list(zip(self.values, self.offsets))})"

    def nodes(self) -> list[tuple[int, int]]:
        """(value, offset) pairs in offset order."""
        return list(zip(self.values, self.offsets))

    def offset_of(self, y: int) -> int:
        try:
            return self._where[y]
        except KeyError:
            raise ConfigError(f"{y} is not in the chain") from None

    def value_at(self, offset: int) -> int | None:
        return self._at.get(offset)

    def weights(self) -> list[int]:
        o = self.offsets
        return [b - a for a, b in zip(o, o[1:])]

    def start(self, y: int) -> None:
        """Make y the single node of an empty chain."""
        if self.offsets:
            raise ConfigError("chain already started")
        self._place(y, 0)

    def lookup(self, y: int, x: int) -> int | None:
        """Value known to equal pi^x(y), or None if the chain does not determine it."""
        return self._at.get(self.offset_of(y) + x)

    def insert_at(self, y: int, x: int, fresh: int) -> int:
        """Record pi^x(y) = fresh, where that offset was previously unknown."""
        target = self.offset_of(y) + x
        if target in self._at:
            raise ConfigError(f"offset {target} already holds {self._at[target]}")
        if fresh in self._where:
            raise ConfigError(f"value {fresh} is already in the chain")
        self._place(fresh, target)
        return fresh

    def prepend(self, y: int, weight: int) -> None:
        """Put y in front of the head with a link of the given weight."""
        if y in self._where:
            raise ConfigError(f"value {y} is already in the chain")
        if weight < 1 or (self.m is not None and weight >= 1 << self.m):
            raise ConfigError(f"weight {weight} out of range")
        self.offsets = [o + weight for o in self.offsets]
        self._where = {v: o + weight for v, o in self._where.items()}
        self._at = {o: v for v, o in self._where.items()}
        self._place(y, 0)

    def _place(self, y: int, offset: int) -> None:
        i = bisect.bisect_left(self.offsets, offset)
        self.offsets.insert(i, offset)
        self.values.insert(i, y)
        self._where[y] = offset
        self._at[offset] = y

    def check(self) -> None:
        """Assert the structural invariants; raises InconsistencyError."""
        o = self.offsets
        if o and o[0] != 0:
            raise InconsistencyError("head offset is not 0")
        if any(b <= a for a, b in zip(o, o[1:])):
            raise InconsistencyError("offsets not strictly increasing")
        if len(set(self.values)) != len(self.values):
            raise InconsistencyError("duplicate values")
        if self.m is not None:
            if any(w >= 1 << self.m for w in self.weights()):
                raise InconsistencyError("a weight exceeds 2^m - 1")
            if o and o[-1] >= len(o) << self.m:
                raise InconsistencyError("max offset not below k * 2^m")

    def dump(self) -> str:
        """One ``offset value`` line per node."""
        return "".join(f"{o} {v}\n" for v, o in zip(self.values, self.offsets))


def consistent_orders(chain: Chain, window: PrimeWindow) -> list[int]:
    """Cycle lengths r in the window for which no two offsets agree mod r."""
    k = len(chain)
    if k == 0:
        raise ConfigError("chain is empty")
    if k == 1:
        return list(window.primes)
    if chain.offsets[-1] < 1 << 62:
        offsets = np.asarray(chain.offsets, dtype=np.int64)
        primes = window.array
        residues = np.sort(offsets[None, :] % primes[:, None], axis=1)
        ok = (np.diff(residues, axis=1) != 0).all(axis=1)
        return primes[ok].tolist()
    return [r for r in window.primes if len({o % r for o in chain.offsets}) == k]


def eliminated_bound(k: int, n: int, m: int) -> int:
    """Most window primes a length-k chain can rule out: pairs * floor((m+n)/(n-1))."""
    if k < 1:
        raise ConfigError(f"k must be positive, got {k}")
    return k * (k - 1) // 2 * ((m + n) // (n - 1))
