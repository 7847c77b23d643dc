"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 invalid input, 3 a verification
check failed.  Results go to stdout as JSON with rationals as strings;
diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Optional, Sequence

from .discrete import DiscreteSignal, discrete_max, discrete_variation
from .envelope import DegenerateCrossing, centered_envelope, noncentered_envelope, variation_enclosure
from .maxop import centered_max, local_max, noncentered_max, truncated_max
from .proofpipe import ProofPipeError, theorem_trace
from .search import MODES, ConfigInvalid, SearchConfig, VerificationFailure, search_ratio
from .stepfn import StepFunction, StepFunctionError, format_rational, to_rational

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_VERIFY = 0, 1, 2, 3


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


def _rational(text: str) -> Fraction:
    try:
        return to_rational(text)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from exc


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON ({exc.msg} at line {exc.lineno})") from exc


def _load_function(path: str) -> StepFunction:
    try:
        return StepFunction.from_json_obj(_load_json(path))
    except StepFunctionError as exc:
        raise InputError(f"{path}: {exc}") from exc


def _load_signal(path: str) -> DiscreteSignal:
    obj = _load_json(path)
    if not isinstance(obj, dict) or not isinstance(obj.get("support", {}), dict):
        raise InputError(f"{path}: expected an object with a 'support' map")
    try:
        return DiscreteSignal.from_json_obj(obj)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")


def _parse_operator(text: str):
    name, _, arg = text.partition(":")
    if name in ("centered", "noncentered") and not arg:
        return name, None
    if name in ("truncated", "local") and arg:
        try:
            return name, to_rational(arg)
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"bad operator parameter {arg!r}") from exc
    raise UsageError(f"unknown operator {text!r}; use centered, noncentered, truncated:R or local:D")


def cmd_eval(args) -> int:
    f = _load_function(args.function)
    name, param = _parse_operator(args.operator)
    try:
        if name == "centered":
            res = centered_max(f, args.point)
        elif name == "noncentered":
            res = noncentered_max(f, args.point)
        elif name == "truncated":
            res = truncated_max(f, args.point, param)
        else:
            res = local_max(f, args.point, param)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    _emit({
        "operator": args.operator,
        "point": format_rational(args.point),
        "value": format_rational(res.value),
        "achieved_by": res.achieved_by.describe(),
    })
    return EXIT_OK


def cmd_variation(args) -> int:
    f = _load_function(args.function)
    if args.eps <= 0:
        raise InputError("--eps must be positive")
    build = centered_envelope if args.operator == "centered" else noncentered_envelope
    env = build(f)
    _emit(variation_enclosure(env, args.eps).to_json_obj())
    return EXIT_OK


def cmd_trace(args) -> int:
    f = _load_function(args.function)
    report = theorem_trace(f, args.points)
    _emit(report.to_json_obj())
    if not report.ok:
        print(f"{len(report.failures())} stage(s) failed", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def cmd_search(args) -> int:
    cfg = SearchConfig(
        seed=args.seed,
        iterations=args.iters,
        max_pieces=args.max_pieces,
        value_den=args.value_den,
        bp_den=args.bp_den,
        eps=args.eps,
        mode=args.mode,
        workers=args.workers,
        batch=args.batch,
    )
    try:
        cfg.validate()
    except ConfigInvalid as exc:
        raise InputError(str(exc)) from exc
    result = search_ratio(cfg)
    if args.history:
        result.write_history_csv(args.history)
    out = result.to_json_obj()
    out["config"] = cfg.to_json_obj()
    _emit(out)
    return EXIT_OK


def cmd_discrete(args) -> int:
    f = _load_signal(args.signal)
    if args.pad is not None and args.pad < 1:
        raise InputError("--pad must be at least 1")
    m = discrete_max(f, pad=args.pad)
    var_f, var_m = discrete_variation(f), discrete_variation(m)
    _emit({
        "max": m.to_json_obj(),
        "variation": format_rational(var_f),
        "max_variation": format_rational(var_m),
        "ratio": format_rational(var_m / var_f) if var_f else None,
    })
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hlvar", description="Exact maximal functions of step functions and their variation.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    e = sub.add_parser("eval", help="evaluate a maximal operator at a point")
    e.add_argument("--function", required=True, help="step function JSON file")
    e.add_argument("--point", required=True, type=_rational)
    e.add_argument("--operator", default="centered", help="centered | noncentered | truncated:R | local:D")
    e.set_defaults(run=cmd_eval)

    v = sub.add_parser("variation", help="certified enclosure of the variation of a maximal function")
    v.add_argument("--function", required=True)
    v.add_argument("--operator", choices=("centered", "noncentered"), default="centered")
    v.add_argument("--eps", type=_rational, default=Fraction(1, 10**6))
    v.set_defaults(run=cmd_variation)

    t = sub.add_parser("trace", help="run every stage of the centered bound and report margins")
    t.add_argument("--function", required=True)
    t.add_argument("--points", nargs="+", type=_rational, default=None,
                   help="sample points (default: envelope boundaries plus one point per piece)")
    t.set_defaults(run=cmd_trace)

    s = sub.add_parser("search", help="seeded search for a large variation ratio")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--iters", type=int, default=1000)
    s.add_argument("--mode", choices=MODES, default="anneal")
    s.add_argument("--max-pieces", type=int, default=8)
    s.add_argument("--value-den", type=int, default=8)
    s.add_argument("--bp-den", type=int, default=8)
    s.add_argument("--eps", type=_rational, default=Fraction(1, 10**6))
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--batch", type=int, default=8)
    s.add_argument("--history", help="write the CSV history here")
    s.set_defaults(run=cmd_search)

    d = sub.add_parser("discrete", help="discrete centered maximal function of a signal")
    d.add_argument("--signal", required=True, help="signal JSON file")
    d.add_argument("--pad", type=int, default=None, help="cells shown past the support (default: support size)")
    d.set_defaults(run=cmd_discrete)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.run(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ProofPipeError, VerificationFailure, DegenerateCrossing) as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
