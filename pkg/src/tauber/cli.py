"""Command-line entry point: ``tauber <command> [options]``.

Exit codes: 0 success, 1 property-suite failure, 2 input error, 3 numerical
failure. CSV floats carry 12 significant digits.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import sys

import numpy as np

from . import checks
from .counterexample import (
    SWEEP_COLUMNS,
    CounterexampleParams,
    WindowError,
    distinct_limits_report,
    dyadic_grid,
    oscillation_scan,
    sweep,
)
from .gamefile import GameFileError, load_game_file
from .hidden import (
    BeliefGrid,
    HiddenGameSpec,
    belief_shapley_operator,
    lipschitz_check,
    refinement_delta,
)
from .matrix_game import SolverError
from .operators import NonConvergenceError, discounted_value, n_stage_value, tauberian_gap
from .stochastic import FiniteGame, GeneratorConfig, game_values, random_game, shapley_operator

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT = 2
EXIT_NUMERIC = 3


class InputError(ValueError):
    pass


def fmt(x):
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".12g")


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _single(values, flag):
    if len(values) != 1:
        raise InputError(f"{flag} takes a single value for this command")
    return values[0]


def _check_lambda(lam):
    if not (0.0 < lam <= 1.0):
        raise InputError(f"--lambda must lie in (0, 1], got {lam}")
    return lam


def _check_n(n):
    if n < 1:
        raise InputError(f"--n must be a positive integer, got {n}")
    return n


def _load(path, kind):
    if path is None:
        raise InputError("--game is required")
    game = load_game_file(path)
    if not isinstance(game, kind):
        want = "hidden game (with signals)" if kind is HiddenGameSpec else "stochastic game"
        raise InputError(f"{path} is not a {want} file")
    return game


@contextlib.contextmanager
def _output(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


def cmd_solve(args):
    game = _load(args.game, FiniteGame)
    n = _check_n(_single(args.n or [100], "--n"))
    lam = _check_lambda(_single(args.lam or [0.01], "--lambda"))
    v_n, v_lam = game_values(game, n, lam, tol=args.tol)
    with _output(args.out) as fh:
        w = _writer(fh)
        w.writerow(["state", "v_n", "v_lambda"])
        for name, a, b in zip(game.state_names, v_n, v_lam):
            w.writerow([name, fmt(a), fmt(b)])
    return EXIT_OK


def cmd_tauber(args):
    if args.random:
        game = random_game(
            GeneratorConfig(seed=args.seed, num_states=args.states, actions1=args.actions, actions2=args.actions)
        )
    else:
        game = _load(args.game, FiniteGame)
    schedule = args.n or [500, 1000, 2000, 5000]
    if any(b <= a for a, b in zip(schedule, schedule[1:])) or min(schedule) < 1:
        raise InputError("--n must be an increasing list of positive integers")
    rows = tauberian_gap(shapley_operator(game), schedule, tol=args.tol)
    gaps = [row.gap for row in rows]
    trend = "nonincreasing" if all(b <= a for a, b in zip(gaps, gaps[1:])) else "not-monotone"
    with _output(args.out) as fh:
        w = _writer(fh)
        w.writerow(["n", "gap"])
        for row in rows:
            w.writerow([row.n, fmt(row.gap)])
        fh.write(f"# trend: {trend}; first-to-last change {fmt(gaps[-1] - gaps[0])}\n")
    return EXIT_OK


def cmd_counterexample(args):
    try:
        params = CounterexampleParams(r=args.r, x=args.x, window_slack=args.window_slack)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if not (0.0 < args.lambda_min <= 1e-3):
        raise InputError(f"--lambda-min must lie in (0, 1e-3], got {args.lambda_min}")
    grid = dyadic_grid(args.lambda_min, j_min=2)
    rows = sweep(params, grid)
    report = oscillation_scan(params, grid) if grid[-1] <= 1e-10 else None
    summary = distinct_limits_report(params, grid) if grid[-1] <= 1e-10 else None
    with _output(args.out) as fh:
        w = _writer(fh)
        w.writerow(SWEEP_COLUMNS)
        for row in rows:
            w.writerow([fmt(row[c]) for c in SWEEP_COLUMNS])
        fh.write(f"# r={params.r} x={fmt(params.x)} lambda_min={fmt(grid[-1])}\n")
        if report is None:
            fh.write("# grid does not reach 1e-10; limit estimates skipped\n")
            return EXIT_OK
        fh.write(f"# liminf estimate of value_G: {fmt(report.liminf)}\n")
        fh.write(f"# limsup estimate of value_G: {fmt(report.limsup)}\n")
        fh.write(f"# oscillation gap: {fmt(report.gap)}\n")
        for label, seq in (("even", report.even), ("odd", report.odd)):
            for m, lam, best, val in seq:
                fh.write(f"# aligned {label} m={m} lambda={fmt(lam)} argmax={best} value_G={fmt(val)}\n")
        for line in summary.lines():
            fh.write(f"# {line}\n")
    return EXIT_OK


def cmd_hidden(args):
    spec = _load(args.game, HiddenGameSpec)
    n = _check_n(_single(args.n or [100], "--n"))
    lam = _check_lambda(_single(args.lam or [0.01], "--lambda"))
    if args.grid < 1:
        raise InputError("--grid must be positive")
    grid = BeliefGrid(spec.num_states, args.grid)
    op = belief_shapley_operator(spec, grid)
    v_n = n_stage_value(op, n)
    v_lam = discounted_value(op, lam, tol=args.tol).value
    with _output(args.out) as fh:
        w = _writer(fh)
        w.writerow(["node"] + [f"p_{s}" for s in spec.state_names] + ["v_n", "v_lambda"])
        for idx, p in enumerate(grid.nodes):
            w.writerow([idx] + [fmt(x) for x in p] + [fmt(v_n[idx]), fmt(v_lam[idx])])
        fh.write(f"# max slope v_n: {fmt(lipschitz_check(grid, v_n))}\n")
        fh.write(f"# max slope v_lambda: {fmt(lipschitz_check(grid, v_lam))}\n")
        if args.refine:
            dn, dl = refinement_delta(spec, args.grid, n, lam, tol=args.tol)
            fh.write(f"# refinement d={args.grid} vs {2 * args.grid}: v_n {fmt(dn)}, v_lambda {fmt(dl)}\n")
    return EXIT_OK


def cmd_check(args):
    if args.adversarial:
        names = ["operator"]
    else:
        names = sorted(checks.SUITES) if args.suite == "all" else [args.suite]
    ok = True
    for name in names:
        result = checks.run_suite(name, trials=args.trials, seed=args.seed, adversarial=args.adversarial)
        print("\n".join(result.lines()))
        ok = ok and result.passed
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def build_parser():
    parser = argparse.ArgumentParser(
        prog="tauber",
        description="n-stage and discounted values of zero-sum stochastic games.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, game=True):
        if game:
            p.add_argument("--game", metavar="PATH", help="JSON game file")
        p.add_argument("--tol", type=float, default=1e-9, help="fixed-point tolerance (default 1e-9)")
        p.add_argument("--out", metavar="PATH", help="write CSV here instead of stdout")

    p = sub.add_parser("solve", help="v_n and v_lambda for every state")
    common(p)
    p.add_argument("--n", type=_int_list, help="number of stages (default 100)")
    p.add_argument("--lambda", dest="lam", type=_float_list, help="discount factor (default 0.01)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("tauber", help="gap table ||v_n - v_{1/n}||")
    common(p)
    p.add_argument("--random", action="store_true", help="use a seeded random game instead of --game")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--states", type=int, default=3)
    p.add_argument("--actions", type=int, default=2)
    p.add_argument("--n", type=_int_list, help="schedule (default 500,1000,2000,5000)")
    p.set_defaults(func=cmd_tauber)

    p = sub.add_parser("counterexample", help="closed-form sweep of the one-shot reductions")
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--x", type=float, default=0.6)
    p.add_argument("--lambda-min", dest="lambda_min", type=float, default=2.0**-40)
    p.add_argument("--window-slack", dest="window_slack", type=int, default=2)
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_counterexample)

    p = sub.add_parser("hidden", help="belief-grid values of a hidden game")
    common(p)
    p.add_argument("--grid", type=int, default=20, help="grid resolution d (default 20)")
    p.add_argument("--n", type=_int_list, help="number of stages (default 100)")
    p.add_argument("--lambda", dest="lam", type=_float_list, help="discount factor (default 0.01)")
    p.add_argument("--refine", action="store_true", help="also report the d vs 2d refinement delta")
    p.set_defaults(func=cmd_hidden)

    p = sub.add_parser("check", help="randomized property suites")
    p.add_argument("--suite", choices=sorted(checks.SUITES) + ["all"], default="all")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--adversarial", action="store_true", help="run the operator suite on a non-nonexpansive fixture")
    p.set_defaults(func=cmd_check)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if getattr(args, "tol", 1.0) <= 0:
        print("error: --tol must be positive", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except (InputError, GameFileError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except WindowError as exc:
        print(f"numerical failure at lambda={exc.lam}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (SolverError, NonConvergenceError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
