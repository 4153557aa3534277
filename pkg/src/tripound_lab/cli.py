"""Command-line entry point.

Exit codes: 0 success, 1 property failure, 2 usage or parse error,
3 infeasible instance or solver error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import bap
from .counting import VARIANTS, SizeLimit, compare_counts
from .harness import SCALING_SIZES, GenSpec, SpecInvalid, gen_instance, measure_scaling, verify_all
from .model import InstanceError, format_pairing, parse_instance, serialize_instance
from .sat import encode, write_dimacs
from .tripound import MODES, SCANS, TripoundError, tripound_solve

EXIT_OK, EXIT_PROPERTY, EXIT_USAGE, EXIT_SOLVER = 0, 1, 2, 3
BUNDLED = "@tripound"


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _load_instance(path: str):
    return parse_instance(_read(path))


def cmd_solve(args) -> int:
    inst = _load_instance(args.file)
    pairing, trace = tripound_solve(inst, args.mode, args.scan)
    sys.stdout.write(format_pairing(inst, pairing))
    if args.trace:
        sys.stdout.write("\n" + trace.format())
    return EXIT_OK


def cmd_encode(args) -> int:
    formula, _ = encode(_load_instance(args.file))
    text = write_dimacs(formula)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_count(args) -> int:
    report = compare_counts(_load_instance(args.file), args.variant)
    sys.stdout.write(report.format())
    return EXIT_OK


def cmd_run_bap(args) -> int:
    source = bap.bundled_tripound_source() if args.program == BUNDLED else _read(args.program)
    inst = _load_instance(args.file)
    program = bap.parse_bap(source)
    state, steps = bap.run_bap(program, bap.state_from_instance(inst), step_cap=args.step_cap)
    names = inst.names
    for row in state.matrices["D"].rows:
        sys.stdout.write(" ".join("-" if x is None else names[x] for x in row) + "\n")
    sys.stdout.write(f"steps={steps}\n")
    return EXIT_OK


def _sizes(text: str) -> list[int]:
    try:
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad size list {text!r}") from None


def cmd_bench(args) -> int:
    report = measure_scaling(args.sizes, args.scan, args.seed, args.incompatibles_first)
    sys.stdout.write(report.format())
    return EXIT_OK


def cmd_verify(args) -> int:
    report = verify_all(args.max_n, args.seed)
    sys.stdout.write(report.format())
    return report.exit_code


def cmd_gen(args) -> int:
    inst = gen_instance(GenSpec(args.n, args.i, args.seed, args.incompatibles_first))
    sys.stdout.write(serialize_instance(inst))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tripound-lab", description="Conflict-constrained pairing laboratory.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="pair an instance with the three-phase algorithm")
    p.add_argument("file")
    p.add_argument("--mode", choices=MODES, default="faithful")
    p.add_argument("--scan", choices=SCANS, default="linear")
    p.add_argument("--trace", action="store_true", help="append step counters")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("encode", help="write the CNF encoding as DIMACS")
    p.add_argument("file")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("count", help="compare the series formula with brute-force counts")
    p.add_argument("file")
    p.add_argument("--variant", choices=VARIANTS, default="even-step")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("run-bap", help=f"run a BAP program on an instance ({BUNDLED} for the bundled one)")
    p.add_argument("program")
    p.add_argument("file")
    p.add_argument("--step-cap", type=int, default=bap.DEFAULT_STEP_CAP)
    p.set_defaults(func=cmd_run_bap)

    p = sub.add_parser("bench", help="fit a log-log slope to step counts")
    p.add_argument("--sizes", type=_sizes, default=list(SCALING_SIZES))
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--scan", choices=SCANS, default="linear")
    p.add_argument("--incompatibles-first", action="store_true")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("verify", help="run the oracle suite and report each claim")
    p.add_argument("--max-n", type=int, default=8)
    p.add_argument("--seed", type=int, default=1)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen", help="print a seeded random instance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--i", type=int, default=0)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--incompatibles-first", action="store_true")
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, InstanceError, SizeLimit, SpecInvalid,
            bap.BapSyntaxError, bap.UndefinedOperator, bap.UndefinedMatrix) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (TripoundError, bap.BapRuntimeError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
