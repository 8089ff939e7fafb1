"""Command-line entry point: ``pmwnet {validate,weights,bound,simulate,sweep}``."""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from . import __version__
from .config import ParseError, load_config
from .model import SpecError, derive_constants
from .oracle import TableTooLarge, cached_bounds, cached_table, minimize_dual
from .policy import WrongTopology
from .scenarios import UnknownScenario, builtin_scenario
from .sim import BoundViolation, SimConfig, UnderflowViolation, run, write_trace
from .sweep import fmt, make_params, sweep
from .weights import ZeroFinalWeight, compute_weights

EXIT_OK, EXIT_INVALID, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", type=Path, help="JSON network description")
    src.add_argument("--scenario", help="built-in network: fusion or general")
    common.add_argument("--out", type=Path, help="write results here as CSV")

    run_opts = argparse.ArgumentParser(add_help=False)
    run_opts.add_argument("--policy", choices=["pmw", "fusion-pmw", "custom"],
                          help="default: fusion-pmw for --scenario fusion, pmw otherwise")
    run_opts.add_argument("--V", type=_floats, default=[10.0], help="tradeoff parameter(s), comma separated")
    run_opts.add_argument("--slots", type=int, default=5_000_000)
    run_opts.add_argument("--seed", type=int, default=0)
    run_opts.add_argument("--theta", type=_floats, help="per-queue perturbation for --policy custom")
    run_opts.add_argument("--check-condition1", action="store_true",
                          help="audit every slot against the brute-force optimum")

    parser = _Parser(prog="pmwnet", description=__doc__)
    parser.add_argument("--version", action="version", version=f"pmwnet {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("validate", parents=[common], help="check a network description")
    sub.add_parser("weights", parents=[common], help="queue weights and their iteration sets")
    b = sub.add_parser("bound", parents=[common], help="utility upper bound and slackness")
    b.add_argument("--V", type=float, default=1.0, help="scale for the dual minimization")
    s = sub.add_parser("simulate", parents=[common, run_opts], help="run one simulation")
    s.add_argument("--trace", type=Path, help="per-slot CSV trace")
    s.add_argument("--floating-buffer", type=int, help="physical buffer size per queue")
    w = sub.add_parser("sweep", parents=[common, run_opts], help="one simulation per V")
    w.add_argument("--jobs", type=int, default=1)
    return parser


def _load(args):
    if args.scenario is not None:
        return builtin_scenario(args.scenario)
    return load_config(args.config.read_text(encoding="utf-8"))


def _policy(args) -> str:
    if args.policy is not None:
        return args.policy
    return "fusion-pmw" if args.scenario == "fusion" else "pmw"


def _emit(args, text: str) -> None:
    if args.out is not None:
        args.out.write_text(text, encoding="utf-8")
    sys.stdout.write(text)


def _pairs(rows) -> str:
    return "name,value\n" + "".join(f"{k},{v}\n" for k, v in rows)


def cmd_validate(args, spec) -> int:
    arr = spec.arrays
    _emit(args, _pairs([("status", "ok"), ("spec_hash", spec.digest()), ("queues", arr.r),
                        ("processors", arr.n_proc), ("states", arr.n_states)]))
    return EXIT_OK


def cmd_weights(args, spec) -> int:
    trace = compute_weights(spec)
    rows = [("K", trace.K)]
    rows += [(f"level_{k + 1}", " ".join(sorted(s))) for k, s in enumerate(trace.level_sets)]
    rows += [(f"w_{q.id}", fmt(x)) for q, x in zip(spec.queues, trace.w)]
    _emit(args, _pairs(rows))
    return EXIT_OK


def cmd_bound(args, spec) -> int:
    bound, slack = cached_bounds(spec)
    table = cached_table(spec)
    V = args.V
    point = minimize_dual(table, V, tolerance=1e-6 * V, certify=V * bound.f_star_av)
    rows = [("f_star_av", fmt(bound.f_star_av)), ("eta", fmt(slack.eta)),
            ("lp_iterations", bound.iterations), ("states", table.n_states), ("table_rows", table.n_rows),
            ("dual_V", fmt(V)), ("dual_g", fmt(point.g_value)),
            ("dual_gap", fmt(point.g_value - V * bound.f_star_av))]
    rows += [(f"gamma_{q.id}", fmt(g)) for q, g in zip(spec.queues, point.gamma)]
    rows += [(f"residual_{q.id}", fmt(x)) for q, x in zip(spec.queues, bound.residuals)]
    _emit(args, _pairs(rows))
    return EXIT_OK


def cmd_simulate(args, spec) -> int:
    if len(args.V) != 1:
        raise UsageError("simulate takes a single --V; use sweep for several")
    params = make_params(spec, args.V[0], _policy(args), args.theta)
    config = SimConfig(slots=args.slots, seed=args.seed, trace=args.trace is not None,
                       check_condition1=args.check_condition1, floating_buffer=args.floating_buffer)
    m = run(spec, params, config)
    r = spec.arrays.r
    cols = ["V", "slots", "seed", "policy", "avg_utility", "avg_weighted_backlog", "cond1_max_gap",
            *[f"max_q_{j + 1}" for j in range(r)]]
    cells = [params.V, args.slots, args.seed, params.kind, m.avg_utility, m.avg_weighted_backlog,
             m.condition1_max_gap, *m.max_backlog]
    if m.null_slot_fraction is not None:
        cols += ["drop_count", "null_slot_fraction"]
        cells += [m.drop_count, m.null_slot_fraction]
    text = ",".join(cols) + "\n" + ",".join(c if isinstance(c, str) else fmt(c) for c in cells) + "\n"
    _emit(args, text)
    if m.trace is not None and args.trace is not None:
        write_trace(args.trace, spec, params, config, m.trace)
    if args.check_condition1 and not math.isnan(m.condition1_max_gap):
        limit = derive_constants(spec, params.w).C
        if m.condition1_max_gap > limit + 1e-9:
            print(f"condition 1 gap {m.condition1_max_gap} exceeds C={limit}", file=sys.stderr)
            return EXIT_VIOLATION
    return EXIT_OK


def cmd_sweep(args, spec) -> int:
    result = sweep(spec, args.V, args.slots, args.seed, _policy(args), theta=args.theta,
                   check_condition1=args.check_condition1, jobs=args.jobs)
    _emit(args, result.to_csv())
    return EXIT_OK


COMMANDS = {"validate": cmd_validate, "weights": cmd_weights, "bound": cmd_bound,
            "simulate": cmd_simulate, "sweep": cmd_sweep}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        spec = _load(args)
        return COMMANDS[args.command](args, spec)
    except UsageError as exc:
        print(f"pmwnet: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SpecError, ParseError, UnknownScenario, ZeroFinalWeight, WrongTopology, TableTooLarge,
            OSError, ValueError) as exc:
        print(f"pmwnet: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (UnderflowViolation, BoundViolation) as exc:
        print(f"pmwnet: violation: {exc}", file=sys.stderr)
        return EXIT_VIOLATION


if __name__ == "__main__":
    sys.exit(main())
