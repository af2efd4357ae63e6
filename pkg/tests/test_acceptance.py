"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines inline; they
are also written to the terminal when output is captured.
"""

import random
import time

import numpy as np
import pytest

from orderfind import cli
from orderfind.chain import Chain, consistent_orders
from orderfind.errors import ConfigError
from orderfind.harness import (
    TV_SCRIPT,
    ExperimentConfig,
    lazy_eager_tv,
    play_adversary,
    run_primes,
    run_sampler_check,
    run_solve,
)
from orderfind.numbertheory import divisors_in_window, primes_in, set_R, set_R_prime
from orderfind.sampler import failure_bound
from orderfind.solvers import choose_split, optimal_splits


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail

    return emit


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def divisor_class(x, cands):
    return {c for c in cands if x % c == 0}


# 1 -------------------------------------------------------------------------


def test_criterion_01_four_query_example(capsys, report):
    start = time.perf_counter()
    code, out, _ = run_cli(capsys, "gametree", "--n", "4", "--m", "7")
    depth = int(out.split("# depth:")[1].split()[0])
    code2, out2, _ = run_cli(capsys, "solve", "--solver", "split", "--n", "4", "--m", "7", "--trials", "16", "--window", "all")
    elapsed = time.perf_counter() - start
    rows = [line.split(",") for line in out2.splitlines()[1:] if line and not line.startswith("#")]
    orders = sorted(int(r[4]) for r in rows)
    correct = all(r[8] == "1" for r in rows)
    max_q = max(int(r[9]) for r in rows)
    ok = code == code2 == 0 and depth == 4 and orders == list(range(1, 17)) and correct and max_q <= 4 and elapsed < 1
    report(1, ok, f"depth={depth} orders=1..16 all_correct={correct} max_queries={max_q} time={elapsed:.2f}s")


# 2 -------------------------------------------------------------------------


def test_criterion_02_splitting_values(report):
    first = {1, 2, 3, 5, 6, 9, 10, 15}
    second = {4, 7, 8, 14}
    cands = list(range(1, 17))
    best, xs = optimal_splits(cands, 7)
    first_ok = any(divisor_class(int(x), cands) == first for x in xs) and 90 in xs.tolist()
    rest = sorted(set(cands) - first)
    best2, xs2 = optimal_splits(rest, 7)
    second_ok = any(divisor_class(int(x), rest) == second for x in xs2) and 56 in xs2.tolist()
    picked = choose_split(cands, 7)
    report(
        2,
        first_ok and second_ok and best == 8 and best2 == 4,
        f"optimal first queries {xs.tolist()} include 90; optimal second queries {xs2.tolist()} include 56;"
        f" smallest-x tie-break picks {picked} with class {sorted(divisor_class(picked, cands))}",
    )


# 3 -------------------------------------------------------------------------


def test_criterion_03_adversary_games(report):
    n, m, games = 16, 32, 1000
    budget = play_adversary(n, m, "scan", 0).threshold // 2
    start = time.perf_counter()
    worst = {}
    bad = []
    for solver in ("scan", "split", "birthday", "random"):
        fewest = None
        for g in range(games):
            game = play_adversary(n, m, solver, budget, seed=g, record_steps=False)
            ords = {w[3] for w in game.witnesses}
            fine = (
                game.adversary.queries <= budget
                and len(game.remaining) >= 2
                and len(game.witnesses) == 2
                and all(w[2] for w in game.witnesses)
                and len(ords) == 2
            )
            if not fine:
                bad.append((solver, g))
            fewest = len(game.remaining) if fewest is None else min(fewest, len(game.remaining))
        worst[solver] = fewest
    elapsed = time.perf_counter() - start
    report(
        3,
        not bad and elapsed < 60,
        f"budget={budget} games={games}/solver min remaining={worst} violations={len(bad)} time={elapsed:.1f}s",
    )


# 4 -------------------------------------------------------------------------


def brute_cycle_consistent(nodes, r):
    """Place each chain value on an r-cycle by walking the weights; False on a clash."""
    slot_of = {}
    pos = prev = 0
    for value, offset in nodes:
        pos = (pos + offset - prev) % r
        prev = offset
        if slot_of.get(pos, value) != value:
            return False
        slot_of[pos] = value
    return True


def random_chain(rng, n, m, k):
    c = Chain(m)
    c.start(0)
    values = rng.sample(range(1, 1 << n), min(k, (1 << n)) - 1)
    for v in values:
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


def test_criterion_04_chain_consistency_oracle(report):
    rng = random.Random(2024)
    mismatches = 0
    for _ in range(10_000):
        n = rng.randrange(3, 9)
        m = rng.randrange(n, 2 * n + 1)
        chain = random_chain(rng, n, m, rng.randrange(1, 10))
        window = primes_in(2, 1 << n)
        expected = [r for r in window if brute_cycle_consistent(chain.nodes(), r)]
        mismatches += consistent_orders(chain, window) != expected
    report(4, mismatches == 0, f"10^4 random chains, n in 3..8, mismatches={mismatches}")


# 5 -------------------------------------------------------------------------


def test_criterion_05_divisor_count_bound(report):
    rng = random.Random(5)
    windows = {n: set_R(n) for n in range(3, 21)}
    violations = worst = 0
    for i in range(100_000):
        n = rng.randrange(3, 21)
        h = rng.randrange(n, 2 * n + 1)
        w = windows[n]
        if i % 2:
            # stress the bound with products of window primes
            x = 1
            while True:
                p = w.primes[rng.randrange(len(w))]
                if x * p >= 1 << h:
                    break
                x *= p
            x *= rng.randrange(1, max(2, (1 << h) // x))
            x = min(x, (1 << h) - 1)
        else:
            x = rng.randrange(1, 1 << h)
        count = len(divisors_in_window(x, w))
        violations += count > h // (n - 1)
        worst = max(worst, count)
    report(5, violations == 0, f"10^5 samples, violations={violations}, largest divisor count={worst}")


# 6 -------------------------------------------------------------------------


def naive_prime_flags(limit):
    flags = bytearray([1]) * (limit + 1)
    flags[0:2] = b"\x00\x00"
    for p in range(2, int(limit**0.5) + 1):
        if flags[p]:
            flags[p * p :: p] = bytes(len(range(p * p, limit + 1, p)))
    return flags


def test_criterion_06_prime_window_counts(report):
    flags = np.frombuffer(naive_prime_flags(1 << 24), dtype=np.uint8)
    mismatched = []
    table = []
    for which, ns in (("R", range(10, 25)), ("Rprime", range(9, 25, 3))):
        for row in run_primes(list(ns), which):
            naive = int(flags[row["lo"] + 1 : row["hi"] + 1].sum())
            if naive != row["count"]:
                mismatched.append((which, row["n"]))
            table.append(f"{which}:{row['n']}={row['count']}({row['holds']})")
    report(6, not mismatched, f"mismatches={mismatched}; counts(holds) " + " ".join(table))


# 7 -------------------------------------------------------------------------


def test_criterion_07_birthday(report):
    start = time.perf_counter()
    main = run_solve(ExperimentConfig(n=16, solver="birthday", k=512, trials=100, seed=0))
    elapsed = time.perf_counter() - start
    rate = main.summary["success_rate"]
    ks = (32, 64, 128, 256, 512, 1024)
    sweep = [run_solve(ExperimentConfig(n=16, solver="birthday", k=k, trials=100, seed=0)).summary["success_rate"] for k in ks]
    monotone = all(b >= a - 0.05 for a, b in zip(sweep, sweep[1:]))
    report(
        7,
        rate >= 0.66 and monotone and elapsed < 10,
        f"rate(k=512)={rate:.2f} time={elapsed:.2f}s sweep " + " ".join(f"k={k}:{r:.2f}" for k, r in zip(ks, sweep)),
    )


# 8 -------------------------------------------------------------------------


def test_criterion_08_failure_bound(report):
    start = time.perf_counter()
    rep = run_sampler_check(12, 10, 100_000, seed=0)
    elapsed = time.perf_counter() - start
    rate = rep.summary["failure_rate"]
    bound = failure_bound(10, 12)
    report(
        8,
        rate <= bound and elapsed < 60,
        f"failure rate={rate:.4f} bound={float(bound):.6f} off-path runs={rep.summary['off_principal_path_runs']}"
        f" time={elapsed:.1f}s",
    )


# 9 -------------------------------------------------------------------------


def test_criterion_09_lazy_eager_tv(report):
    tv = lazy_eager_tv(6, 12, set_R_prime(6), TV_SCRIPT, 100_000, seed=0)
    report(9, tv <= 0.02, f"script={TV_SCRIPT} TV={tv:.4f}")


# 10 ------------------------------------------------------------------------

COMMANDS = [
    ("primes", "--n", "10", "12", "--window", "R"),
    ("solve", "--n", "10", "--solver", "scan", "--trials", "10", "--seed", "3"),
    ("solve", "--n", "10", "--solver", "split", "--trials", "10", "--seed", "3", "--jobs", "2"),
    ("solve", "--n", "12", "--solver", "birthday", "--trials", "10", "--seed", "3"),
    ("adversary", "--n", "12", "--solver", "split", "--seed", "3"),
    ("sampler-check", "--n", "6", "--t", "4", "--trials", "500", "--seed", "3"),
    ("gametree", "--n", "4", "--m", "7"),
]


def test_criterion_10_determinism(capsys, tmp_path, report):
    differing = []
    for i, argv in enumerate(COMMANDS):
        runs = []
        for rep in range(2):
            out = tmp_path / f"{i}-{rep}.csv"
            extra = () if argv[0] == "gametree" else ("--out", str(out))
            code, stdout, _ = run_cli(capsys, *argv, *extra)
            files = sorted(tmp_path.glob(f"{i}-{rep}.csv*"))
            runs.append((code, stdout, [p.read_bytes() for p in files]))
        if runs[0] != runs[1] or runs[0][0] != 0:
            differing.append(argv[0])
    report(10, not differing, f"{len(COMMANDS)} commands run twice, differing={differing}")
