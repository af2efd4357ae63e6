"""Seeded experiments behind the command line.

Each ``run_*`` function returns plain data (rows plus a summary) and each
``format_*`` function turns that into the exact text the CLI prints, so tests
can check either layer. Trial seeds are derived from the master seed by
:func:`trial_seed`; rows are always emitted in trial order, whatever the
worker count.
"""

from __future__ import annotations

import csv
import hashlib
import io
import math
import random
import struct
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial
from statistics import NormalDist

from .adversary import AdversaryState, evasive_threshold
from .errors import BudgetExhausted, ConfigError, InconsistencyError
from .numbertheory import PrimeWindow, check_lemma4, check_lemma7, primes_in, r_prime_floor, set_R, set_R_prime
from .oracle import BlackBoxOracle, OracleParams, build_two_cycle, order_of, validate_nm
from .sampler import LazySampler, eager_build, failure_bound
from .solvers import (
    QueryBudget,
    birthday_solver,
    gametree_depth,
    scan_solver,
    splitting_solver,
    verify_order,
)

SOLVERS = ("scan", "split", "birthday")
WINDOWS = ("R", "Rprime", "all")
SOLVE_COLUMNS = ("trial", "seed", "n", "m", "r", "y0", "solver", "reported", "correct", "queries")
SAMPLER_COLUMNS = ("seed", "n", "m", "r", "t", "collision_found", "failure_a", "failure_b")

_MASK64 = (1 << 64) - 1


def trial_seed(master: int, index: int) -> int:
    """64-bit trial seed: first 8 bytes (little endian) of BLAKE2b over
    the packed pair (master mod 2^64, index)."""
    data = struct.pack("<QQ", master & _MASK64, index & _MASK64)
    return int.from_bytes(hashlib.blake2b(data, digest_size=8).digest(), "little")


def fmt_fraction(f: Fraction) -> str:
    f = Fraction(f)
    return f"{f.numerator}/{f.denominator} ({float(f):.6f})"


def wilson_interval(successes: int, trials: int, level: float = 0.95) -> tuple[float, float]:
    if trials == 0:
        return 0.0, 1.0
    z = NormalDist().inv_cdf(0.5 + level / 2)
    p = successes / trials
    denom = 1 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    lo = 0.0 if successes == 0 else max(0.0, centre - half)
    hi = 1.0 if successes == trials else min(1.0, centre + half)
    return lo, hi


def resolve_window(name: str, n: int) -> PrimeWindow | None:
    if name == "R":
        return set_R(n)
    if name == "Rprime":
        return set_R_prime(n)
    if name == "all":
        return None
    raise ConfigError(f"unknown window {name!r}; choose from {', '.join(WINDOWS)}")


def _map_trials(fn, count: int, jobs: int):
    if jobs <= 1 or count < 2:
        return [fn(i) for i in range(count)]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, range(count), chunksize=max(1, count // (4 * jobs))))


# --- solve -------------------------------------------------------------------


@dataclass
class ExperimentConfig:
    n: int
    m: int | None = None
    solver: str = "split"
    trials: int = 1
    seed: int = 0
    k: int | None = None
    window: str = "R"
    out: str | None = None
    jobs: int = 1

    def __post_init__(self):
        if self.m is None:
            self.m = 2 * self.n
        validate_nm(self.n, self.m)
        if self.solver not in SOLVERS:
            raise ConfigError(f"unknown solver {self.solver!r}; choose from {', '.join(SOLVERS)}")
        if self.window not in WINDOWS:
            raise ConfigError(f"unknown window {self.window!r}; choose from {', '.join(WINDOWS)}")
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if self.k is None:
            self.k = 2 * math.isqrt(1 << self.n)
        if self.solver == "birthday" and self.m < self.n + 1:
            raise ConfigError("the birthday solver needs m >= n + 1")
        if self.jobs < 1:
            raise ConfigError("jobs must be at least 1")


@dataclass
class ExperimentReport:
    rows: list[dict]
    summary: dict = field(default_factory=dict)


def run_solver(name: str, oracle, y0: int, k: int, seed: int):
    if name == "scan":
        return scan_solver(oracle, y0)
    if name == "split":
        return splitting_solver(oracle, y0)
    if name == "birthday":
        return birthday_solver(oracle, y0, k, seed)
    raise ConfigError(f"unknown solver {name!r}")


def solve_trial(cfg: ExperimentConfig, window: PrimeWindow | None, trial: int) -> dict:
    seed = trial_seed(cfg.seed, trial)
    rng = random.Random(seed)
    if window is None:
        r = trial % (1 << cfg.n) + 1
    else:
        r = window.primes[rng.randrange(len(window))]
    perm = build_two_cycle(cfg.n, r, seed)
    y0 = int(perm.A[rng.randrange(r)])
    oracle = BlackBoxOracle(perm, cfg.m, record=False)
    result = run_solver(cfg.solver, oracle, y0, cfg.k, seed)
    truth = order_of(perm, y0)
    correct = result.reported == truth
    if result.reported is not None and result.reported < 1 << cfg.m:
        verified = verify_order(BlackBoxOracle(perm, cfg.m, record=False), y0, result.reported)
        if verified != correct:
            raise InconsistencyError(
                f"trial {trial}: verify_order says {verified} for reported {result.reported}, true order {truth}"
            )
    return {
        "trial": trial,
        "seed": seed,
        "n": cfg.n,
        "m": cfg.m,
        "r": r,
        "y0": y0,
        "solver": cfg.solver,
        "reported": "fail" if result.reported is None else result.reported,
        "correct": int(correct),
        "queries": result.queries_used,
    }


def run_solve(cfg: ExperimentConfig) -> ExperimentReport:
    window = resolve_window(cfg.window, cfg.n)
    if window is not None:
        window.require_nonempty()
    rows = _map_trials(partial(solve_trial, cfg, window), cfg.trials, cfg.jobs)
    wins = sum(row["correct"] for row in rows)
    queries = [row["queries"] for row in rows]
    lo, hi = wilson_interval(wins, len(rows))
    summary = {
        "trials": len(rows),
        "successes": wins,
        "success_rate": wins / len(rows),
        "ci95_low": lo,
        "ci95_high": hi,
        "mean_queries": sum(queries) / len(queries),
        "max_queries": max(queries),
    }
    return ExperimentReport(rows, summary)


def csv_text(columns, rows) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def format_summary(summary: dict) -> str:
    lines = []
    for key, value in summary.items():
        if isinstance(value, float):
            value = f"{value:.6f}"
        elif isinstance(value, Fraction):
            value = fmt_fraction(value)
        lines.append(f"# {key}: {value}")
    return "\n".join(lines) + "\n"


# --- primes ------------------------------------------------------------------


PRIMES_COLUMNS = ("n", "window", "lo", "hi", "count", "bound", "bound_decimal", "holds")


def run_primes(ns, which: str) -> list[dict]:
    rows = []
    for n in ns:
        if which == "R":
            window = set_R(n)
            check = check_lemma4(n)
        elif which == "Rprime":
            if not 3 <= n <= 30:
                raise ConfigError(f"Rprime window needs 3 <= n <= 30, got {n}")
            window = primes_in(r_prime_floor(n), 1 << n)
            check = check_lemma7(n)
        else:
            raise ConfigError(f"unknown window {which!r}; choose R or Rprime")
        rows.append(
            {
                "n": n,
                "window": which,
                "lo": window.lo,
                "hi": window.hi,
                "count": check.count,
                "bound": f"{check.bound.numerator}/{check.bound.denominator}",
                "bound_decimal": f"{float(check.bound):.6f}",
                "holds": "yes" if check.holds else "no",
            }
        )
    return rows


# --- adversary ---------------------------------------------------------------


ADVERSARY_COLUMNS = ("step", "x", "y", "response", "chain_length", "remaining")


class _Recorder:
    """Oracle proxy that logs the remaining consistent orders after each answer."""

    def __init__(self, adversary: AdversaryState):
        self.adv = adversary
        self.n, self.m = adversary.n, adversary.m
        self.steps: list[dict] = []

    @property
    def queries(self) -> int:
        return self.adv.queries

    def query(self, x: int, y: int) -> int:
        response = self.adv.respond(x, y)
        self.steps.append(
            {
                "step": self.adv.queries,
                "x": x,
                "y": y,
                "response": response,
                "chain_length": len(self.adv.chain),
                "remaining": len(self.adv.remaining_orders()),
            }
        )
        return response


@dataclass
class AdversaryGame:
    adversary: AdversaryState
    steps: list[dict]
    threshold: int
    truncated: bool
    reported: int | None
    remaining: list[int]
    witnesses: list  # (r, permutation, replay_ok, order_of_y0)


def play_adversary(
    n: int, m: int, solver: str, max_queries: int, seed: int = 0, k: int | None = None, *, record_steps: bool = True
) -> AdversaryGame:
    """Run one solver against the evasive adversary and build two witnesses."""
    if max_queries < 0:
        raise ConfigError("max_queries must be non-negative")
    validate_nm(n, m)
    if n < 2:
        raise ConfigError("the adversary needs n >= 2")
    rng = random.Random(seed)
    y0 = rng.randrange(1 << n)
    adv = AdversaryState(OracleParams(n, m, y0))
    front = _Recorder(adv) if record_steps else adv
    handle = QueryBudget(front, max_queries)
    k = 2 * math.isqrt(1 << n) if k is None else k
    truncated = False
    reported = None
    try:
        if solver == "random":
            # not a solver: uniformly random queries, used to stress the adversary
            while True:
                handle.query(rng.randrange(1 << m), rng.randrange(1 << n))
        result = run_solver(solver, handle, y0, k, seed)
        reported = result.reported
    except BudgetExhausted:
        truncated = True
    remaining = adv.remaining_orders()
    witnesses = []
    for r in remaining[:2]:
        perm = adv.finalize(r)
        ok = adv.transcript.replay(perm)
        ord_y0 = order_of(perm, y0)
        if not ok or ord_y0 != r:
            raise InconsistencyError(f"witness for r={r} fails replay or has ord(y0)={ord_y0}")
        witnesses.append((r, perm, ok, ord_y0))
    steps = front.steps if record_steps else []
    return AdversaryGame(adv, steps, evasive_threshold(n, m), truncated, reported, remaining, witnesses)


def format_adversary(game: AdversaryGame, solver: str) -> str:
    adv = game.adversary
    out = [f"# adversary n={adv.n} m={adv.m} solver={solver} y0={adv.params.y0}\n"]
    out.append(csv_text(ADVERSARY_COLUMNS, game.steps))
    out.append(
        format_summary(
            {
                "queries_answered": adv.queries,
                "truncated": "yes" if game.truncated else "no",
                "reported": "none" if game.reported is None else game.reported,
                "evasive_threshold": game.threshold,
                "chain_length": len(adv.chain),
                "remaining_orders": len(game.remaining),
                "window_size": len(adv.window),
            }
        )
    )
    out.append("[chain]\n")
    out.append(adv.chain.dump())
    out.append("[witnesses]\n")
    for r, _perm, ok, ord_y0 in game.witnesses:
        out.append(f"r={r} ord_y0={ord_y0} replay={'ok' if ok else 'FAIL'}\n")
    return "".join(out)


# --- sampler-check -----------------------------------------------------------


def random_script_run(sampler: LazySampler, t: int, script_seed: int) -> None:
    """Feed t random queries; half re-use an element already seen."""
    rng = random.Random(script_seed)
    seen: list[int] = []
    for _ in range(t):
        x = rng.randrange(1 << sampler.m)
        if seen and rng.random() < 0.5:
            y = seen[rng.randrange(len(seen))]
        else:
            y = rng.randrange(sampler.size)
        seen.append(y)
        seen.append(sampler.query(x, y))


def sampler_trial(n: int, m: int, window: PrimeWindow, t: int, master: int, trial: int) -> dict:
    seed = trial_seed(master, trial)
    sampler = LazySampler(n, m, window, seed, instrument=True)
    random_script_run(sampler, t, trial_seed(seed, 1))
    return {
        "seed": seed,
        "n": n,
        "m": m,
        "r": sampler.r,
        "t": t,
        "collision_found": int(sampler.collisions > 0),
        "failure_a": sampler.failures.event_a_count,
        "failure_b": sampler.failures.event_b_count,
        "_off_path": sampler.off_path,
    }


def response_pattern(script, responses) -> tuple:
    """Relabel values by first appearance along y_1, resp_1, y_2, resp_2, ...

    The sampled distribution is invariant under relabeling of values, so two
    samplers agree on the joint response law exactly when they agree on the
    law of this pattern.
    """
    labels: dict[int, int] = {}
    out = []
    for (_x, y), resp in zip(script, responses):
        labels.setdefault(y, len(labels))
        out.append(labels.setdefault(resp, len(labels)))
    return tuple(out)


def lazy_eager_tv(n: int, m: int, window: PrimeWindow, script, samples: int, seed: int) -> float:
    """Empirical total-variation distance between lazy and eager response patterns."""
    lazy: dict[tuple, int] = {}
    eager: dict[tuple, int] = {}
    for s in range(samples):
        sampler = LazySampler(n, m, window, trial_seed(seed, 2 * s))
        key = response_pattern(script, [sampler.query(x, y) for x, y in script])
        lazy[key] = lazy.get(key, 0) + 1
        perm = eager_build(trial_seed(seed, 2 * s + 1), n, window)
        key = response_pattern(script, [perm.power(x, y) for x, y in script])
        eager[key] = eager.get(key, 0) + 1
    keys = lazy.keys() | eager.keys()
    return sum(abs(lazy.get(k, 0) - eager.get(k, 0)) for k in keys) / (2 * samples)


#: Fixed script used for the lazy/eager comparison at small n.
TV_SCRIPT = ((1, 0), (165, 0), (53, 1))


@dataclass
class SamplerReport:
    rows: list[dict]
    summary: dict


def run_sampler_check(
    n: int, t: int, trials: int, seed: int, m: int | None = None, window: str = "Rprime", jobs: int = 1, tv_samples: int | None = None
) -> SamplerReport:
    m = 2 * n if m is None else m
    validate_nm(n, m)
    if t < 0 or trials < 1:
        raise ConfigError("need t >= 0 and trials >= 1")
    win = resolve_window(window, n)
    if win is None:
        raise ConfigError("sampler-check needs a prime window (R or Rprime)")
    win.require_nonempty()
    rows = _map_trials(partial(sampler_trial, n, m, win, t, seed), trials, jobs)
    failed = sum(1 for row in rows if row["failure_a"] or row["failure_b"])
    off = sum(1 for row in rows if row.pop("_off_path"))
    bound = failure_bound(t, n)
    summary = {
        "trials": trials,
        "failure_rate": failed / trials,
        "failure_bound": bound,
        "within_bound": "yes" if failed / trials <= bound else "no",
        "event_a_runs": sum(1 for row in rows if row["failure_a"]),
        "event_b_runs": sum(1 for row in rows if row["failure_b"]),
        "off_principal_path_runs": off,
        "collision_rate": sum(row["collision_found"] for row in rows) / trials,
    }
    if n <= 6 and max(x for x, _ in TV_SCRIPT).bit_length() <= m:
        summary["tv_script"] = " ".join(f"({x},{y})" for x, y in TV_SCRIPT)
        summary["tv_distance"] = lazy_eager_tv(n, m, win, TV_SCRIPT, tv_samples or trials, seed)
    return SamplerReport(rows, summary)


# --- gametree ----------------------------------------------------------------


def run_gametree(n: int, m: int) -> dict:
    return {"n": n, "m": m, "depth": gametree_depth(n, m), "information_bound": n}
