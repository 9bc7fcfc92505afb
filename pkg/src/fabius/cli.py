"""Command-line front end.

Commands
--------
eval ARG        exact f at a nonnegative dyadic rational (extended domain)
table MAX_N     dump the identity tables, optionally through a JSON cache
values M        stream f(j/2**M) for all j
verify ...      run exact verification suites (golden / identities / oracle)
approx X EPS    certified approximation at an arbitrary nonnegative rational

Exit codes: 0 success, 1 verification failure, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from fractions import Fraction
from typing import Optional, Sequence

from . import verify as verify_mod
from .evaluator import FabiusEvaluator
from .identities import CacheFormatError, IdentityTable
from .rationals import (
    DomainError,
    DyadicRational,
    as_dyadic,
    is_power_of_two,
    to_decimal_string,
)

CACHE_ENV_VAR = "FABIUS_CACHE"
DEFAULT_DIGITS = 12
DEFAULT_VALUES_LIMIT = 20


def parse_dyadic_argument(text: str) -> DyadicRational:
    """Parse "k/2^m", "k/d" with d a power of two, or a terminating decimal.

    Rejects negative inputs and anything whose reduced denominator is not
    a power of two, naming the offending token.
    """
    t = text.strip()
    try:
        return as_dyadic(t)
    except ValueError as exc:
        if "power of two" in str(exc):
            raise DomainError(
                f"'{text}' is not a dyadic rational; only values k/2^m are "
                "exactly evaluable (try 'fabius approx' for everything else)"
            ) from exc
        if "nonnegative" in str(exc):
            raise DomainError(f"'{text}' is negative; the domain is x >= 0") from exc
        raise DomainError(f"'{text}' is not a valid number literal") from exc


def _parse_fraction(text: str, what: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(f"'{text}' is not a valid {what}") from exc


def _add_format_option(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--format",
        choices=("pretty", "json", "csv"),
        default="pretty",
        help="output format (default: pretty)",
    )


def _add_digits_option(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--digits",
        type=int,
        default=DEFAULT_DIGITS,
        metavar="N",
        help=f"decimal digits for display (default: {DEFAULT_DIGITS})",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fabius",
        description="Exact evaluation of the Fabius function at dyadic rationals.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="exact value at a dyadic rational")
    p.add_argument("value", help="dyadic argument, e.g. 5/16, 0.3125 or 3/2^5")
    _add_format_option(p)
    _add_digits_option(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("table", help="identity tables up to a level")
    p.add_argument("max_n", type=int, help="highest level to emit")
    p.add_argument(
        "--cache",
        metavar="PATH",
        default=None,
        help=f"JSON cache file (default: ${CACHE_ENV_VAR} if set)",
    )
    p.add_argument(
        "--stats",
        action="store_true",
        help="report how many levels were loaded vs computed (stderr)",
    )
    _add_format_option(p)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("values", help="stream f(j/2^m) for all j")
    p.add_argument("m", type=int, help="denominator exponent")
    p.add_argument(
        "--limit",
        type=int,
        default=DEFAULT_VALUES_LIMIT,
        metavar="M",
        help=f"largest allowed m (default: {DEFAULT_VALUES_LIMIT})",
    )
    _add_format_option(p)
    _add_digits_option(p)
    p.set_defaults(func=cmd_values)

    p = sub.add_parser("verify", help="run exact verification suites")
    p.add_argument("--golden", action="store_true", help="golden value table")
    p.add_argument(
        "--identities",
        type=int,
        metavar="MAX_N",
        default=None,
        help="identity consistency up to level MAX_N",
    )
    p.add_argument(
        "--oracle",
        type=int,
        metavar="N",
        default=None,
        help="distributional brackets at truncation level N",
    )
    _add_format_option(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("approx", help="certified approximation at any x >= 0")
    p.add_argument("x", help="query point (decimal or fraction, e.g. 0.3)")
    p.add_argument("eps", help="error tolerance (e.g. 1/64)")
    _add_format_option(p)
    _add_digits_option(p)
    p.set_defaults(func=cmd_approx)

    return parser


def cmd_eval(args) -> int:
    d = parse_dyadic_argument(args.value)
    value = FabiusEvaluator().eval_extended(d)
    decimal = to_decimal_string(value, args.digits)
    if args.format == "json":
        print(json.dumps({
            "argument": str(d.as_fraction),
            "value": str(value),
            "decimal": decimal,
        }))
    elif args.format == "csv":
        w = csv.writer(sys.stdout)
        w.writerow(["argument", "numerator", "denominator", "decimal"])
        w.writerow([str(d.as_fraction), value.numerator, value.denominator, decimal])
    else:
        print(f"f({d.as_fraction}) = {value}")
        print(f"          ~ {decimal}")
    return 0


def _load_or_new_table(cache_path: Optional[str]) -> IdentityTable:
    if cache_path and os.path.exists(cache_path):
        return IdentityTable.load(cache_path)
    return IdentityTable()


def cmd_table(args) -> int:
    if args.max_n < 1:
        raise DomainError(f"max_n must be >= 1, got {args.max_n}")
    cache_path = args.cache if args.cache is not None else os.environ.get(CACHE_ENV_VAR)
    table = _load_or_new_table(cache_path)
    loaded = min(table.max_n, args.max_n)
    computed = max(0, args.max_n - table.max_n)
    table.extend_to(args.max_n)
    if cache_path and computed:
        table.save(cache_path)

    if args.format == "json":
        print(json.dumps(table.to_json_doc(max_n=args.max_n), indent=1))
    elif args.format == "csv":
        w = csv.writer(sys.stdout)
        w.writerow(["n", "kind", "sigma", "power", "coefficient"])
        for n in range(1, args.max_n + 1):
            s, d = table.entry(n)
            for k, c in enumerate(s.coeffs):
                w.writerow([n, "S", s.sigma, 2 * k, str(c)])
            for k, c in enumerate(d.coeffs):
                w.writerow([n, "D", d.sigma, 2 * k + 1, str(c)])
    else:
        for n in range(1, args.max_n + 1):
            s, d = table.entry(n)
            print(f"n={n}")
            print(f"  {s.equation_str()}")
            print(f"  {d.equation_str()}")
    if args.stats:
        print(f"levels loaded: {loaded}, computed: {computed}", file=sys.stderr)
    return 0


def cmd_values(args) -> int:
    if args.m < 0:
        raise DomainError(f"m must be >= 0, got {args.m}")
    if args.m > args.limit:
        raise DomainError(
            f"m = {args.m} exceeds the limit {args.limit}; raise it with --limit"
        )
    evaluator = FabiusEvaluator()
    rows = evaluator.values_at_denominator(args.m)
    den = 1 << args.m
    if args.format == "json":
        out = sys.stdout
        out.write("[\n")
        for j, fv in enumerate(rows):
            if j:
                out.write(",\n")
            out.write(json.dumps({
                "j": j,
                "numerator": fv.value.numerator,
                "denominator": fv.value.denominator,
                "decimal": to_decimal_string(fv.value, args.digits),
            }))
        out.write("\n]\n")
    elif args.format == "csv":
        w = csv.writer(sys.stdout)
        w.writerow(["j", "numerator", "denominator", "decimal"])
        for j, fv in enumerate(rows):
            w.writerow([
                j,
                fv.value.numerator,
                fv.value.denominator,
                to_decimal_string(fv.value, args.digits),
            ])
    else:
        for j, fv in enumerate(rows):
            print(f"f({j}/{den}) = {fv.value}")
    return 0


def cmd_verify(args) -> int:
    reports = []
    if args.golden:
        reports.append(verify_mod.verify_golden())
    if args.identities is not None:
        if args.identities < 1:
            raise DomainError(f"--identities needs MAX_N >= 1, got {args.identities}")
        reports.append(verify_mod.verify_identities(args.identities))
    if args.oracle is not None:
        reports.append(verify_mod.verify_brackets(args.oracle))
    if not reports:
        raise DomainError("nothing to verify: pass --golden, --identities or --oracle")

    if args.format == "json":
        print(json.dumps([r.to_dict() for r in reports], indent=1))
    elif args.format == "csv":
        w = csv.writer(sys.stdout)
        w.writerow(["suite", "cases", "failures", "pass"])
        for r in reports:
            w.writerow([r.suite, r.cases, len(r.failures), r.passed])
    else:
        for r in reports:
            print(r)
    return 0 if all(r.passed for r in reports) else 1


def cmd_approx(args) -> int:
    x = _parse_fraction(args.x, "query point")
    eps = _parse_fraction(args.eps, "tolerance")
    result = FabiusEvaluator().approx_eval(x, eps)
    decimal = to_decimal_string(result.value, args.digits)
    if args.format == "json":
        print(json.dumps({
            "query": str(result.query),
            "anchor": str(result.anchor.as_fraction),
            "value": str(result.value),
            "decimal": decimal,
            "error_bound": str(result.error_bound),
        }))
    elif args.format == "csv":
        w = csv.writer(sys.stdout)
        w.writerow(["query", "anchor", "value", "decimal", "error_bound"])
        w.writerow([
            str(result.query),
            str(result.anchor.as_fraction),
            str(result.value),
            decimal,
            str(result.error_bound),
        ])
    else:
        print(f"f({result.query}) ~ {result.value}")
        print(f"  anchor      = {result.anchor.as_fraction}")
        print(f"  decimal     ~ {decimal}")
        print(f"  error bound = {result.error_bound}")
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed the diagnostic
        return 0 if exc.code in (0, None) else 2
    try:
        return args.func(args)
    except CacheFormatError as exc:
        print(f"fabius: corrupt table cache: {exc}", file=sys.stderr)
        return 2
    except (DomainError, ValueError, ZeroDivisionError, OSError) as exc:
        print(f"fabius: error: {exc}", file=sys.stderr)
        return 2


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
