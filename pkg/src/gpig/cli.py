"""Command-line surface: solving, queries, curve export, benchmarking,
oracle cross-checks and seeded simulation.

Exit codes: 0 success, 1 solver failure, 2 input problem.  The default
numeric mode is float; override per-invocation with --mode or globally
with the GPG_NUM_MODE environment variable.
"""

import argparse
import json
import os
import sys

from . import bench, numeric, oracle
from .errors import GpigError, OutOfDomain, OutOfRange, ValidationError
from .model import PRESETS, load_spec, preset, validate
from .solver import solve, solve_pair, solve_solitaire, value_at

EXIT_OK = 0
EXIT_SOLVER = 1
EXIT_INPUT = 2

_INPUT_ERRORS = (ValidationError, OutOfRange, OutOfDomain, OSError, json.JSONDecodeError)


def _add_spec_args(p):
    p.add_argument("spec", nargs="?", help="game spec JSON file")
    p.add_argument("--preset", choices=sorted(PRESETS), help="built-in game")
    p.add_argument("--target", type=int, help="override the target score")
    p.add_argument("--mode", choices=(numeric.RATIONAL, numeric.FLOAT))


def _resolve_mode(args):
    if args.mode:
        return args.mode
    env = os.environ.get("GPG_NUM_MODE")
    if env:
        if env not in (numeric.RATIONAL, numeric.FLOAT):
            raise ValidationError(f"GPG_NUM_MODE must be rational or float, got {env!r}")
        return env
    return numeric.FLOAT


def _load(args, mode=None):
    mode = mode or _resolve_mode(args)
    if args.preset and args.spec:
        raise ValidationError("give either a spec file or --preset, not both")
    if args.preset:
        spec = preset(args.preset, mode=mode, target=args.target)
    elif args.spec:
        spec = load_spec(args.spec, mode=mode, target=args.target)
    else:
        raise ValidationError("a spec file or --preset is required")
    validate(spec)
    return spec


def _fmt(value, mode):
    return numeric.format_value(value, mode)


def cmd_solve(args):
    spec = _load(args)
    table, policy = solve(spec, kernel=args.kernel)
    if args.out:
        table.write_csv(args.out)
    if args.policy:
        policy.write_csv(args.policy)
    print(_fmt(table.get(spec.target, spec.target), spec.mode))
    return EXIT_OK


def cmd_value(args):
    spec = _load(args)
    table, _ = solve(spec, kernel=args.kernel)
    v = value_at(spec, table, (args.a, args.b, args.tau))
    print(_fmt(v, spec.mode))
    return EXIT_OK


def cmd_policy(args):
    spec = _load(args)
    _, policy = solve(spec, kernel=args.kernel)
    print(policy.action(args.a, args.b, args.tau))
    return EXIT_OK


def cmd_curve(args):
    spec = _load(args)
    table, _ = solve(spec, kernel=args.kernel)
    res = solve_pair(spec, args.a, args.b, table, construction="envelope")
    for suffix, f in (("ab", res["f_ab"]), ("ba", res["f_ba"])):
        path = f"{args.out}_{suffix}.csv"
        with open(path, "w") as fh:
            fh.write("y,f\n")
            for y, v in zip(f.xs, f.vs):
                fh.write(f"{numeric.format_curve(y, spec.mode)},"
                         f"{numeric.format_curve(v, spec.mode)}\n")
    print(f"x={_fmt(res['x'], spec.mode)} y={_fmt(res['y'], spec.mode)}")
    return EXIT_OK


def cmd_solitaire(args):
    spec = _load(args)
    plan = solve_solitaire(spec)
    print(f"threshold={plan.threshold} "
          f"expected_score={_fmt(plan.expected_score, spec.mode)}")
    return EXIT_OK


def cmd_bench(args):
    spec = _load(args, mode=numeric.FLOAT)
    if _resolve_mode(args) != numeric.FLOAT:
        raise ValidationError("bench runs in float mode only")
    targets = [int(t) for t in args.targets.split(",") if t.strip()]
    if not targets:
        raise ValidationError("no targets given")
    report = bench.run(spec, targets, kernel=args.kernel)
    for row in report.rows:
        print(f"N={row.target} kernel={row.kernel} states={row.states} "
              f"ops={row.ops} ratio={row.ratio:.6f} elapsed={row.elapsed:.3f}s")
    verdict = report.verdict()
    if verdict is not None:
        print(f"scaling: {verdict}")
    if args.out:
        report.write_json(args.out)
    return EXIT_OK if verdict != "FAIL" else EXIT_SOLVER


def cmd_oracle(args):
    if args.max_target > 25:
        raise ValidationError("oracle cross-check is limited to targets <= 25")
    args.target = args.max_target
    spec = _load(args)
    table, _ = solve(spec, kernel=args.kernel)
    ref = oracle.value_iteration(spec)
    worst = 0
    for a in range(1, spec.target + 1):
        for b in range(1, spec.target + 1):
            d = abs(float(table.get(a, b)) - float(ref.get(a, b)))
            worst = max(worst, d)
    print(f"max discrepancy {worst:.3e}")
    return EXIT_OK


def cmd_simulate(args):
    spec = _load(args)
    table, policy = solve(spec, kernel=args.kernel)
    report = oracle.simulation_report(
        spec,
        table.get(spec.target, spec.target),
        policy,
        policy,
        args.games,
        args.seed,
        workers=args.workers,
    )
    print(json.dumps(report, indent=2))
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="gpig", description="Exact solver for generalized Pig dice games."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, kernels=("auto", "pure", "fast"), **kw):
        p = sub.add_parser(name, **kw)
        _add_spec_args(p)
        p.add_argument("--kernel", choices=kernels, default="auto")
        p.set_defaults(fn=fn)
        return p

    p = add("solve", cmd_solve, help="solve the full game")
    p.add_argument("--out", help="value-table CSV path")
    p.add_argument("--policy", help="policy CSV path")

    p = add("value", cmd_value, help="print one v(a, b, tau)")
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--tau", type=int, default=0)

    p = add("policy", cmd_policy, help="print the optimal action at (a, b, tau)")
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--tau", type=int, required=True)

    p = add("curve", cmd_curve, help="export the pair's two turn-value curves")
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--out", required=True, help="output path prefix")

    p = add("solitaire", cmd_solitaire, help="single-turn expected-score maximizer")

    # "both" runs the compiled core and the pure fallback for comparison
    p = add("bench", cmd_bench, kernels=("auto", "pure", "fast", "both"),
            help="operation-count scaling benchmark")
    p.add_argument("--targets", default="25,50,100,200")
    p.add_argument("--out", help="JSON report path")

    p = add("oracle", cmd_oracle, help="diff the solver against value iteration")
    p.add_argument("--max-target", type=int, default=10)

    p = add("simulate", cmd_simulate, help="seeded optimal-vs-optimal matches")
    p.add_argument("--games", type=int, default=1000000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--workers", type=int, default=1)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except _INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except GpigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
