"""Command line entry point: ``quonalg <verb> [options]``.

Exit status is 0 on success, 1 when a verification fails or the two
normal-ordering engines disagree, 2 on parse or usage errors and 3 when a
resource cap is hit.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import numpy as np

from . import combinatorics as comb
from .combinatorics import CapExceededError
from .fock import (
    GRID_D,
    GRID_M,
    GRID_Q,
    FockConfig,
    field_moments,
    verify_relation_grid,
)
from .formatting import FORMATS, format_normal_form, format_vacuum
from .parsing import ExpressionSyntaxError, parse_expression
from .qwick import verify_pi_equals_c, verify_specialization
from .symbolic import DEFAULT_CAP, normal_order_rewrite, normal_order_wick, vacuum_expectation, verify_engines

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3
SUITES = ("wick-vs-rewrite", "pi-equals-c", "fock-relations", "specialization", "all")


class UsageError(Exception):
    pass


def _parse_q(text: str):
    """``"p/q"`` stays an exact Fraction; a decimal becomes a float."""
    try:
        q = Fraction(text) if "/" in text else float(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"invalid q {text!r}") from None
    if not -1 <= q <= 1:
        raise UsageError(f"q must lie in [-1, 1], got {text}")
    return q


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _m_value(text: str):
    if text in ("inf", "unbounded"):
        return None
    return _positive(text)


def _parse_pattern(text: str) -> tuple[int, ...]:
    """Accept ``-+-+`` or comma separated ``-1,1,...``."""
    text = text.strip()
    if "," in text:
        try:
            return tuple(int(x) for x in text.split(","))
        except ValueError:
            raise UsageError(f"bad sign pattern {text!r}") from None
    table = {"-": -1, "+": 1}
    if not text or any(ch not in table for ch in text):
        raise UsageError(f"bad sign pattern {text!r}")
    return tuple(table[ch] for ch in text)


def _read_expression(source: str) -> str:
    return sys.stdin.read() if source == "-" else source


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quonalg", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("normal-order", help="normal order a word")
    p.add_argument("expression", help='word such as "a(f) a+(g)", or - for stdin')
    p.add_argument("--m", type=_positive, required=True)
    p.add_argument("--mode", choices=("wick", "rewrite", "both"), default="wick")
    p.add_argument("--format", choices=FORMATS, default="plain")
    p.add_argument("--cap", type=_positive, default=DEFAULT_CAP, help="maximum word length")

    p = sub.add_parser("vacuum", help="vacuum expectation of a word")
    p.add_argument("expression")
    p.add_argument("--m", type=_positive, required=True)
    p.add_argument("--q", help='numeric q, either "p/q" (exact) or a decimal')
    p.add_argument("--concrete-projectors", choices=("on", "off"), default="on")
    p.add_argument("--format", choices=FORMATS, default="plain")
    p.add_argument("--cap", type=_positive, default=DEFAULT_CAP)

    p = sub.add_parser("moments", help="field moments on the truncated Fock space")
    p.add_argument("--q", required=True)
    p.add_argument("--m", type=_m_value, required=True, help="positive integer or inf")
    p.add_argument("--dim", type=_positive, default=2)
    p.add_argument("--levels", type=_positive, default=4, help="highest tensor level built")
    p.add_argument("--orders", type=_positive, default=6, help="highest moment order")
    p.add_argument("--format", choices=("plain", "json"), default="plain")

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", choices=SUITES, default="all")
    p.add_argument("--max-len", type=_positive, help="largest word or pattern length")
    p.add_argument("--random", type=int, default=200, help="random words for wick-vs-rewrite")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--levels", type=_positive, default=4, help="n_max for fock-relations")

    p = sub.add_parser("count", help="count combinatorial objects")
    p.add_argument("--what", choices=("pp", "ncpp", "patterns", "feynman"), required=True)
    p.add_argument("--n", type=_positive, help="half-size: number of pairs")
    p.add_argument("--pattern", help="sign pattern for feynman, e.g. -+-+ or -1,1,-1,1")
    p.add_argument("--k", type=_positive, help="diagram degree for feynman")
    return parser


# -- verbs --------------------------------------------------------------------

def _normal_order(args, out) -> int:
    word = parse_expression(_read_expression(args.expression), args.m)
    if args.mode == "wick":
        nf = normal_order_wick(word, cap=args.cap)
    elif args.mode == "rewrite":
        nf = normal_order_rewrite(word, cap=args.cap)
    else:
        nf = normal_order_wick(word, cap=args.cap)
        other = normal_order_rewrite(word, cap=args.cap)
        if nf != other:
            print("engines disagree", file=sys.stderr)
            print("wick:    " + format_normal_form(nf), file=sys.stderr)
            print("rewrite: " + format_normal_form(other), file=sys.stderr)
            return EXIT_FAIL
    print(format_normal_form(nf, args.format), file=out)
    return EXIT_OK


def _vacuum(args, out) -> int:
    word = parse_expression(_read_expression(args.expression), args.m)
    q = _parse_q(args.q) if args.q is not None else None
    poly = vacuum_expectation(word, concrete=args.concrete_projectors == "on", cap=args.cap)
    print(format_vacuum(poly, args.format, q), file=out)
    return EXIT_OK


def _moments(args, out) -> int:
    q = float(_parse_q(args.q))
    if args.orders > 2 * args.levels:
        raise UsageError(f"--orders {args.orders} needs --levels >= {(args.orders + 1) // 2}")
    cfg = FockConfig(q, args.m, args.dim, args.levels)
    f = np.zeros(args.dim)
    f[0] = 1.0
    moments = field_moments(cfg, f, args.orders)
    if args.format == "json":
        print(json.dumps({"q": q, "m": args.m, "dim": args.dim, "levels": args.levels,
                          "moments": moments}, indent=2), file=out)
    else:
        for k, v in enumerate(moments, start=1):
            print(f"{k} {v:.12g}", file=out)
    return EXIT_OK


def _run_suite(name: str, args) -> dict:
    if name == "wick-vs-rewrite":
        return verify_engines(max_len=args.max_len or 6, random_cases=args.random, seed=args.seed)
    if name == "pi-equals-c":
        return verify_pi_equals_c(args.max_len or 10)
    if name == "fock-relations":
        return verify_relation_grid(GRID_Q, GRID_M, GRID_D, n_max=args.levels, seed=args.seed)
    return verify_specialization(args.max_len or 6)


def _verify(args, out) -> int:
    names = SUITES[:-1] if args.suite == "all" else (args.suite,)
    reports = [_run_suite(name, args) for name in names]
    payload = reports[0] if len(reports) == 1 else {
        "suite": "all", "pass": all(r["pass"] for r in reports), "reports": reports}
    print(json.dumps(payload, indent=2), file=out)
    return EXIT_OK if all(r["pass"] for r in reports) else EXIT_FAIL


def _count(args, out) -> int:
    if args.what == "feynman" and args.pattern is not None:
        signs = _parse_pattern(args.pattern)
        degrees = [args.k] if args.k else range(1, len(signs) + 1)
        if len(signs) > 2 * comb.PATTERN_CAP:
            raise CapExceededError(f"pattern length {len(signs)} exceeds {2 * comb.PATTERN_CAP}")
        total = sum(len(comb.enumerate_feynman(signs, k)) for k in degrees)
    else:
        if args.n is None:
            raise UsageError("--n is required")
        if args.what == "pp":
            total = len(comb.enumerate_pair_partitions(args.n))
        elif args.what == "ncpp":
            total = len(comb.enumerate_noncrossing(args.n))
        elif args.what == "patterns":
            total = len(comb.enumerate_balanced_patterns(args.n))
        else:
            # complete diagrams summed over balanced patterns of length 2n
            k = args.k or args.n
            total = sum(len(comb.enumerate_feynman(eps, k))
                        for eps in comb.enumerate_balanced_patterns(args.n))
    print(total, file=out)
    return EXIT_OK


VERBS = {
    "normal-order": _normal_order,
    "vacuum": _vacuum,
    "moments": _moments,
    "verify": _verify,
    "count": _count,
}


def dispatch(args: argparse.Namespace, out=None) -> int:
    out = out if out is not None else sys.stdout
    try:
        return VERBS[args.verb](args, out)
    except CapExceededError as exc:
        print(f"error: resource cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except ExpressionSyntaxError as exc:
        print(f"error: syntax error at {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    return dispatch(args)


if __name__ == "__main__":
    sys.exit(main())
