"""Command-line interface.

Subcommands: ``generate``, ``solve``, ``oracle`` and ``report``.
Exit codes: 0 success, 1 runtime error, 2 usage error.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time

from .acs import AcsParams, run_acs
from .boa import BoaParams, run_boa
from .exceptions import CapacityError, GenerationError, InstanceError
from .gen import GenSpec, generate
from .model import load_instance, save_instance
from .oracle import OracleLimits, assignment_space, exact_optimum, exhaustive_rule_strings
from .records import RecordError, RunRecord, format_report, read_records, write_records
from .rules import DecodeParams
from .schedule import DEFAULT_W_DEMAND

log = logging.getLogger("rulesched")


class CommandError(Exception):
    """Runtime failure reported with exit code 1."""


class UsageError(Exception):
    """Bad flag combination reported with exit code 2."""


def _int_list(text):
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _non_negative_int(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {v}")
    return v


def _load(path):
    try:
        return load_instance(path)
    except OSError as exc:
        raise CommandError(f"cannot read instance {path}: {exc.strerror or exc}") from None
    except InstanceError as exc:
        raise CommandError(f"{path}: {exc}") from None


def cmd_generate(args):
    try:
        spec = GenSpec(n=args.nurses, p=args.grades, tightness=args.tightness, seed=args.seed,
                       days_values=args.days, nights_values=args.nights,
                       night_fraction=args.night_fraction,
                       combined_fraction=args.combined_fraction, name=args.name,
                       rounding=args.rounding)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    try:
        inst = generate(spec)
    except GenerationError as exc:
        raise CommandError(str(exc)) from None
    save_instance(inst, args.out)
    print(f"wrote {args.out}: n={inst.n} m={inst.m} p={inst.p}")


def _solve_one(inst, args, seed):
    dp = DecodeParams(w_demand=args.w_demand, seed=seed)
    if args.algo == "boa":
        pop = args.pop
        half = max(1, pop // 2)
        params = BoaParams(pop_size=pop, select_count=half, offspring_count=half,
                           max_iterations=args.iters if args.iters is not None else 200,
                           eval_budget=args.eval_budget, seed=seed, decode=dp)
        return run_boa(inst, params)
    params = AcsParams(max_iterations=args.iters if args.iters is not None else 500,
                       seed=seed, decode=dp)
    return run_acs(inst, params)


def cmd_solve(args):
    inst = _load(args.instance)
    optimum = args.optimum
    if optimum is None and not args.no_oracle:
        limits = OracleLimits(args.max_space)
        if assignment_space(inst) <= limits.max_search_space:
            optimum = exact_optimum(inst, args.w_demand, limits)[1]
        else:
            log.info("search space too large for the oracle; optimum column left empty")

    records = []
    for seed in range(args.seed, args.seed + args.runs):
        start = time.perf_counter()
        result = _solve_one(inst, args, seed)
        ms = (time.perf_counter() - start) * 1000 if args.timing else None
        records.append(RunRecord(instance=inst.name, algo=args.algo, seed=seed,
                                 fitness=result.fitness, feasible=result.feasible,
                                 optimum=optimum, ms=ms, evals=result.evaluations))

    write_records(records, sys.stdout)
    if args.out:
        mode = "a" if args.append else "w"
        with open(args.out, mode, newline="") as fh:
            write_records(records, fh, header=fh.tell() == 0)


def cmd_oracle(args):
    inst = _load(args.instance)
    limits = OracleLimits(args.max_space)
    try:
        if args.mode == "assignments":
            sched, fit = exact_optimum(inst, args.w_demand, limits)
            print(f"fitness: {fit:.10g}")
            print("schedule: " + " ".join(str(j) for j in sched.assignment))
        else:
            rs, fit = exhaustive_rule_strings(inst, DecodeParams(w_demand=args.w_demand, seed=args.seed),
                                              limits)
            print(f"fitness: {fit:.10g}")
            print("rules: " + " ".join(str(r) for r in rs))
    except CapacityError as exc:
        raise CommandError(str(exc)) from None


def cmd_report(args):
    records = []
    for path in args.inputs:
        try:
            with open(path, newline="") as fh:
                records.extend(read_records(fh, path))
        except OSError as exc:
            raise CommandError(f"cannot read {path}: {exc.strerror or exc}") from None
        except RecordError as exc:
            raise CommandError(str(exc)) from None
    sys.stdout.write(format_report(records))


def build_parser():
    parser = argparse.ArgumentParser(prog="rulesched", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a synthetic instance")
    g.add_argument("--nurses", type=_positive_int, required=True)
    g.add_argument("--grades", type=_positive_int, default=3)
    g.add_argument("--tightness", type=float, default=0.9)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--days", type=_int_list, default=(4, 5), help="day-pattern sizes, e.g. 4,5")
    g.add_argument("--nights", type=_int_list, default=(3,), help="night-pattern sizes")
    g.add_argument("--night-fraction", type=float, default=0.2)
    g.add_argument("--combined-fraction", type=float, default=0.0)
    g.add_argument("--rounding", choices=("floor", "ceil"), default="floor")
    g.add_argument("--name")
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("solve", help="run BOA or ACS for one or more seeds")
    s.add_argument("--algo", choices=("boa", "acs"), required=True)
    s.add_argument("--instance", required=True)
    s.add_argument("--seed", type=_non_negative_int, default=0)
    s.add_argument("--runs", type=_positive_int, default=1)
    s.add_argument("--iters", type=_non_negative_int)
    s.add_argument("--pop", type=_positive_int, default=140)
    s.add_argument("--eval-budget", type=_positive_int)
    s.add_argument("--w-demand", type=float, default=DEFAULT_W_DEMAND)
    s.add_argument("--optimum", type=float, help="known optimum; skips the oracle")
    s.add_argument("--no-oracle", action="store_true", help="leave the optimum column empty")
    s.add_argument("--max-space", type=_positive_int, default=10**7)
    s.add_argument("--timing", action="store_true", help="fill the ms column (breaks byte-identical output)")
    s.add_argument("--append", action="store_true", help="append to --out instead of overwriting")
    s.add_argument("--out")
    s.set_defaults(func=cmd_solve)

    o = sub.add_parser("oracle", help="exhaustive optimum on a small instance")
    o.add_argument("--instance", required=True)
    o.add_argument("--mode", choices=("assignments", "rulestrings"), default="assignments")
    o.add_argument("--w-demand", type=float, default=DEFAULT_W_DEMAND)
    o.add_argument("--seed", type=_non_negative_int, default=0, help="decoder seed in rulestrings mode")
    o.add_argument("--max-space", type=_positive_int, default=10**7)
    o.set_defaults(func=cmd_oracle)

    r = sub.add_parser("report", help="summarise result CSVs")
    r.add_argument("--in", dest="inputs", nargs="+", required=True)
    r.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    if getattr(args, "w_demand", 1.0) <= 0:
        parser.error("--w-demand must be > 0")
    if args.command == "solve" and args.algo == "boa" and args.pop < 2:
        parser.error("--pop must be >= 2")
    try:
        args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return 2
    except (CommandError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
