import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orderfind.chain import Chain, consistent_orders, eliminated_bound
from orderfind.errors import ConfigError
from orderfind.numbertheory import PrimeWindow, primes_in, set_R

W1113 = PrimeWindow(8, 16, (11, 13))


def chain_from(pairs, m=None):
    c = Chain(m)
    (v0, o0), *rest = pairs
    assert o0 == 0
    c.start(v0)
    for v, o in rest:
        c.insert_at(v0, o, v)
    return c


def cycle_mapping_consistent(chain, r):
    """Try to lay the chain on an r-cycle link by link; None if two values clash."""
    slots = {}
    pos = 0
    prev = None
    for value, offset in chain.nodes():
        if prev is not None:
            pos = (pos + offset - prev) % r
        if slots.get(pos, value) != value:
            return False
        slots[pos] = value
        prev = offset
    return True


def pairwise_weight_sums_ok(chain, r):
    w = chain.weights()
    for i in range(len(w)):
        total = 0
        for j in range(i, len(w)):
            total += w[j]
            if total % r == 0:
                return False
    return True


def test_lookup_examples():
    c = chain_from([("y1", 0), ("y2", 6)])
    assert c.lookup("y1", 6) == "y2"
    assert c.lookup("y1", 3) is None
    c3 = chain_from([("y1", 0), ("y2", 6), ("y3", 11)])
    assert c3.lookup("y2", 5) == "y3"
    assert c3.lookup("y2", 0) == "y2"
    with pytest.raises(ConfigError):
        c3.lookup("zz", 1)


def test_insert_at_examples():
    c = chain_from([("y1", 0), ("y2", 6)])
    assert c.insert_at("y1", 3, "v") == "v"
    assert c.nodes() == [("y1", 0), ("v", 3), ("y2", 6)]
    assert c.weights() == [3, 3]
    c = chain_from([("y1", 0)])
    c.insert_at("y1", 5, "v")
    assert c.nodes() == [("y1", 0), ("v", 5)]
    c = chain_from([("y1", 0), ("y2", 6)])
    c.insert_at("y2", 4, "v")
    assert c.nodes() == [("y1", 0), ("y2", 6), ("v", 10)]


def test_insert_at_errors():
    c = chain_from([("y1", 0), ("y2", 6)])
    with pytest.raises(ConfigError):
        c.insert_at("y1", 6, "v")
    with pytest.raises(ConfigError):
        c.insert_at("y1", 2, "y2")


def test_prepend_examples():
    c = chain_from([("y1", 0)])
    c.prepend("y", 1)
    assert c.nodes() == [("y", 0), ("y1", 1)]
    c = chain_from([("y1", 0), ("y2", 6)])
    c.prepend("y", 4)
    assert c.nodes() == [("y", 0), ("y1", 4), ("y2", 10)]
    assert c.lookup("y", 10) == "y2"
    c = Chain()
    c.prepend("y", 1)
    assert c.nodes() == [("y", 0)]


def test_prepend_errors():
    c = chain_from([("y1", 0)], m=3)
    with pytest.raises(ConfigError):
        c.prepend("y1", 1)
    with pytest.raises(ConfigError):
        c.prepend("y", 0)
    with pytest.raises(ConfigError):
        c.prepend("y", 8)


@pytest.mark.parametrize(
    "offsets, expected", [([0, 6], [11, 13]), ([0, 11], [13]), ([0, 5, 11], [13]), ([0], [11, 13])]
)
def test_consistent_orders_examples(offsets, expected):
    c = chain_from([(i, o) for i, o in enumerate(offsets)])
    assert consistent_orders(c, W1113) == expected


def test_consistent_orders_empty_chain():
    with pytest.raises(ConfigError):
        consistent_orders(Chain(), W1113)


def test_consistent_orders_huge_offsets_fall_back():
    c = chain_from([(0, 0), (1, 11 << 70), (2, (13 << 70) + 1)])
    assert consistent_orders(c, W1113) == [13]
    assert consistent_orders(c, W1113) == [r for r in W1113 if pairwise_weight_sums_ok(c, r)]


def test_eliminated_bound_examples():
    assert eliminated_bound(1, 4, 7) == 0
    assert eliminated_bound(2, 4, 7) == 3
    assert eliminated_bound(4, 16, 32) == 18


def random_chain(rng, n, m, k):
    c = Chain(m)
    c.start(0)
    values = list(range(1, 1 << n))
    rng.shuffle(values)
    for v in values[: k - 1]:
        while True:
            if rng.random() < 0.3:
                try:
                    c.prepend(v, rng.randrange(1, 1 << m))
                    break
                except ConfigError:
                    continue
            anchor = c.values[rng.randrange(len(c))]
            x = rng.randrange(1 << m)
            if c.lookup(anchor, x) is None:
                c.insert_at(anchor, x, v)
                break
    return c


@settings(max_examples=200, deadline=None)
@given(n=st.integers(3, 8), k=st.integers(1, 12), seed=st.integers(0, 2**32))
def test_chain_invariants_and_elimination_bound(n, k, seed):
    rng = random.Random(seed)
    m = rng.randrange(n, 2 * n + 1)
    c = random_chain(rng, n, m, min(k, 1 << n))
    c.check()
    w = set_R(n)
    eliminated = len(w) - len(consistent_orders(c, w))
    assert eliminated <= eliminated_bound(len(c), n, m)


@pytest.mark.parametrize("seed", range(5))
def test_consistent_orders_matches_cycle_mapping(seed):
    rng = random.Random(seed)
    window = primes_in(1, 64)  # every prime r small enough to collide often
    for _ in range(200):
        n = rng.randrange(3, 9)
        c = random_chain(rng, n, rng.randrange(n, 12), rng.randrange(1, 9))
        expected = [r for r in window if cycle_mapping_consistent(c, r)]
        assert consistent_orders(c, window) == expected
        assert expected == [r for r in window if pairwise_weight_sums_ok(c, r)]


def test_dump_format():
    c = chain_from([(5, 0), (9, 6)])
    assert c.dump() == "0 5\n6 9\n"
