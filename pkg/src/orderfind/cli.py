"""Command line entry point: ``orderfind <subcommand> [flags]``.

Exit status is 0 on success, 2 on a configuration error and 3 when an
oracle, adversary or solver invariant is violated.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import harness
from .errors import CapacityError, ConfigError, InconsistencyError
from .oracle import save_permutation

EXIT_CONFIG = 2
EXIT_INCONSISTENT = 3


def _emit(text: str, out: str | None, summary: str = "") -> None:
    if out:
        Path(out).write_text(text)
        sys.stdout.write(summary)
    else:
        sys.stdout.write(text + summary)


def cmd_primes(args) -> None:
    rows = harness.run_primes(args.n, args.window)
    _emit(harness.csv_text(harness.PRIMES_COLUMNS, rows), args.out)


def cmd_solve(args) -> None:
    cfg = harness.ExperimentConfig(
        n=args.n[0],
        m=args.m,
        solver=args.solver,
        trials=args.trials,
        seed=args.seed,
        k=args.k,
        window=args.window,
        out=args.out,
        jobs=args.jobs,
    )
    report = harness.run_solve(cfg)
    head = {"solver": cfg.solver, "n": cfg.n, "m": cfg.m, "window": cfg.window, "seed": cfg.seed}
    if cfg.solver == "birthday":
        head["k"] = cfg.k
    _emit(
        harness.csv_text(harness.SOLVE_COLUMNS, report.rows),
        args.out,
        harness.format_summary(head | report.summary),
    )


def cmd_adversary(args) -> None:
    n = args.n[0]
    m = 2 * n if args.m is None else args.m
    max_queries = args.max_queries
    if max_queries is None:
        max_queries = harness.evasive_threshold(n, m) // 2
    game = harness.play_adversary(n, m, args.solver, max_queries, args.seed, args.k)
    text = harness.format_adversary(game, args.solver)
    _emit(text, args.out)
    if args.out:
        for r, perm, _ok, _ord in game.witnesses:
            save_permutation(f"{args.out}.witness-{r}.txt", perm)


def cmd_sampler_check(args) -> None:
    report = harness.run_sampler_check(
        args.n[0], args.t, args.trials, args.seed, m=args.m, window=args.window, jobs=args.jobs,
        tv_samples=args.tv_samples,
    )
    _emit(
        harness.csv_text(harness.SAMPLER_COLUMNS, report.rows),
        args.out,
        harness.format_summary(report.summary),
    )


def cmd_gametree(args) -> None:
    result = harness.run_gametree(args.n[0], 2 * args.n[0] if args.m is None else args.m)
    sys.stdout.write(harness.format_summary(result))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="orderfind", description="Black-box order-finding laboratory.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, many_n=False):
        p.add_argument("--n", type=int, nargs="+" if many_n else 1, required=True)
        p.add_argument("--m", type=int, default=None, help="exponent bit length (default 2n)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default=None, help="write the delimited output here")
        return p

    p = common(sub.add_parser("primes", help="prime window counts against the density bounds"), many_n=True)
    p.add_argument("--window", choices=("R", "Rprime"), default="R")
    p.set_defaults(func=cmd_primes)

    p = common(sub.add_parser("solve", help="run a solver on random two-cycle permutations"))
    p.add_argument("--solver", choices=harness.SOLVERS, default="split")
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--k", type=int, default=None, help="birthday sample count (default 2*2^(n/2))")
    p.add_argument("--window", choices=harness.WINDOWS, default="R")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_solve)

    p = common(sub.add_parser("adversary", help="play a solver against the evasive adversary"))
    p.add_argument("--solver", choices=harness.SOLVERS, default="split")
    p.add_argument("--max-queries", type=int, default=None, help="default floor(threshold / 2)")
    p.add_argument("--k", type=int, default=None)
    p.set_defaults(func=cmd_adversary)

    p = common(sub.add_parser("sampler-check", help="failure events of the lazy sampler"))
    p.add_argument("--t", type=int, default=10, help="queries per script")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--window", choices=("R", "Rprime"), default="Rprime")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--tv-samples", type=int, default=None, help="samples for the lazy/eager comparison (n <= 6)")
    p.set_defaults(func=cmd_sampler_check)

    p = common(sub.add_parser("gametree", help="exact worst-case depth of the splitting strategy"))
    p.set_defaults(func=cmd_gametree)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (ConfigError, CapacityError) as exc:
        print(f"orderfind: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InconsistencyError as exc:
        print(f"orderfind: inconsistency: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENT
    return 0


if __name__ == "__main__":
    sys.exit(main())
