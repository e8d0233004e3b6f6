"""Command-line interface with machine-readable output.

Every command emits one self-describing record (or a stream of CSV rows)
in the selected format: ``json`` for structured consumers, ``csv`` for
plotting and spreadsheets, ``plain`` for humans. Big integers are always
serialized as decimal strings so that downstream float parsing can never
corrupt terms, and certified values carry their midpoint plus a base-2
radius exponent so certification claims stay auditable.

Exit codes: 0 success, 2 validation/precondition error, 3 precision
exhaustion, 4 external service unavailable.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from typing import Dict, List, Optional, Sequence

import mpmath

from . import errata as errata_mod
from .certified import (
    CertificationError,
    ComplexBall,
    DEFAULT_PRECISION,
    RealBall,
    dyadic_fraction,
)
from .factor import (
    DegenerateInputError,
    classify_ring,
    compose_lucas,
    factor_standard,
    verify_factorization,
)
from .oeis import OeisClient, OeisResponseError
from .polyalg import StandardParams, standard_poly, standard_terms
from .salem import (
    enumerate_ldsalem,
    is_salem_standard,
    nearest_integer_sequence,
    region_bounds,
    t_family_params,
)
from .seqcore import (
    LucasParams,
    SequenceWindow,
    divisibility_check,
    lucas_terms,
)

PRECISION_ENV_VAR = "LDS4_PRECISION"

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_PRECISION = 3
EXIT_UNAVAILABLE = 4


def _default_precision() -> int:
    raw = os.environ.get(PRECISION_ENV_VAR)
    if raw:
        try:
            return max(2, int(raw))
        except ValueError:
            pass
    return DEFAULT_PRECISION


def _radius_log2(ball_hi, ball_lo) -> Optional[int]:
    width = dyadic_fraction(ball_hi) - dyadic_fraction(ball_lo)
    if width == 0:
        return None
    return math.ceil(math.log2(width))


def real_ball_payload(ball: RealBall, digits: int = 30) -> Dict[str, object]:
    return {
        "midpoint": mpmath.nstr(ball.mid, digits),
        "radius_log2": _radius_log2(ball.hi, ball.lo),
    }


def complex_ball_payload(ball: ComplexBall, digits: int = 30) -> Dict[str, object]:
    radius = None
    for part in (ball.re, ball.im):
        part_radius = _radius_log2(part.hi, part.lo)
        if part_radius is not None:
            radius = part_radius if radius is None else max(radius, part_radius)
    return {
        "re_midpoint": mpmath.nstr(ball.re.mid, digits),
        "im_midpoint": mpmath.nstr(ball.im.mid, digits),
        "radius_log2": radius,
    }


def _terms_as_strings(window: SequenceWindow) -> List[str]:
    return [str(t) for t in window.terms]


class CommandOutput:
    """One output record plus its tabular (CSV) projection."""

    def __init__(
        self,
        command: str,
        parameters: Dict[str, object],
        result: Dict[str, object],
        precision_bits: Optional[int] = None,
        certified: Optional[bool] = None,
        errata_flags: Sequence[str] = (),
        csv_header: Sequence[str] = (),
        csv_rows: Sequence[Sequence[object]] = (),
        plain_lines: Sequence[str] = (),
    ):
        self.record = {
            "command": command,
            "parameters": parameters,
            "result": result,
            "precision_bits": precision_bits,
            "certified": certified,
            "errata_flags": list(errata_flags),
            "status": "ok",
        }
        self.csv_header = list(csv_header)
        self.csv_rows = [list(row) for row in csv_rows]
        self.plain_lines = list(plain_lines)

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return json.dumps(self.record, indent=2)
        if fmt == "csv":
            buf = io.StringIO()
            writer = csv.writer(buf, lineterminator="\n")
            writer.writerow(self.csv_header)
            writer.writerows(self.csv_rows)
            return buf.getvalue().rstrip("\n")
        return "\n".join(self.plain_lines)


def _error_payload(command: str, exc: Exception, exit_code: int) -> str:
    return json.dumps(
        {
            "command": command,
            "status": "error",
            "error": {"type": type(exc).__name__, "message": str(exc)},
            "exit_code": exit_code,
        },
        indent=2,
    )


def _parse_int_list(raw: str) -> List[int]:
    try:
        return [int(part) for part in raw.replace(" ", "").split(",") if part != ""]
    except ValueError as exc:
        raise ValueError(f"expected a comma-separated integer list, got {raw!r}") from exc


# -- command implementations ----------------------------------------------


def _cmd_lucas(args) -> CommandOutput:
    params = LucasParams(args.h, args.k)
    window = lucas_terms(params, args.count)
    terms = _terms_as_strings(window)
    return CommandOutput(
        "lucas",
        {"h": args.h, "k": args.k, "count": args.count},
        {"start_index": 0, "terms": terms},
        csv_header=("n", "term"),
        csv_rows=list(enumerate(terms)),
        plain_lines=[", ".join(terms)],
    )


def _cmd_compose(args) -> CommandOutput:
    a = LucasParams(args.h1, args.k1)
    b = LucasParams(args.h2, args.k2)
    sp, ic = compose_lucas(a, b)
    window = standard_terms(sp, args.count)
    terms = _terms_as_strings(window)
    flags = errata_mod.flags_for_command("compose")
    return CommandOutput(
        "compose",
        {"h1": args.h1, "k1": args.k1, "h2": args.h2, "k2": args.k2, "count": args.count},
        {
            "p": sp.p,
            "q": sp.q,
            "r": sp.r,
            "characteristic_polynomial": list(standard_poly(sp).coefficients),
            "initial_conditions": _terms_as_strings(ic),
            "terms": terms,
        },
        errata_flags=flags,
        csv_header=("n", "term"),
        csv_rows=list(enumerate(terms)),
        plain_lines=[
            f"standard parameters: p={sp.p} q={sp.q} r={sp.r}",
            "terms: " + ", ".join(terms),
        ],
    )


def _cmd_factor(args) -> CommandOutput:
    sp = StandardParams(args.p, args.q, args.r)
    pairs = factor_standard(sp, args.precision)
    payload = []
    rows = []
    lines = [f"factorizations of (p={sp.p}, q={sp.q}, r={sp.r}):"]
    for pair in pairs:
        verified = verify_factorization(sp, pair, args.verify_n)
        ring = classify_ring(pair)
        entry = {
            "family": pair.family_tag,
            "first": {
                "h": complex_ball_payload(pair.first.h),
                "k": complex_ball_payload(pair.first.k),
            },
            "second": {
                "h": complex_ball_payload(pair.second.h),
                "k": complex_ball_payload(pair.second.k),
            },
            "sequence_params": {
                "p": pair.params.p,
                "q": pair.params.q,
                "r": pair.params.r,
            },
            "ring": ring.value,
            "verified": verified,
            "diagnostics": list(pair.diagnostics),
        }
        payload.append(entry)
        rows.append(
            (
                pair.family_tag,
                entry["first"]["h"]["re_midpoint"],
                entry["first"]["h"]["im_midpoint"],
                entry["first"]["k"]["re_midpoint"],
                entry["first"]["k"]["im_midpoint"],
                entry["second"]["h"]["re_midpoint"],
                entry["second"]["h"]["im_midpoint"],
                entry["second"]["k"]["re_midpoint"],
                entry["second"]["k"]["im_midpoint"],
                ring.value,
                verified,
            )
        )
        lines.append(
            f"  [{pair.family_tag}] x^2 - ({entry['first']['h']['re_midpoint']}"
            f"+{entry['first']['h']['im_midpoint']}i) x + ... ring={ring.value}"
            f" verified={verified}"
        )
    flags = errata_mod.flags_for_command("factor", p=sp.p)
    return CommandOutput(
        "factor",
        {"p": args.p, "q": args.q, "r": args.r, "verify_n": args.verify_n},
        {"pairs": payload},
        precision_bits=args.precision,
        certified=all(entry["verified"] for entry in payload),
        errata_flags=flags,
        csv_header=(
            "family",
            "h1_re", "h1_im", "k1_re", "k1_im",
            "h2_re", "h2_im", "k2_re", "k2_im",
            "ring", "verified",
        ),
        csv_rows=rows,
        plain_lines=lines,
    )


def _cmd_salem_check(args) -> CommandOutput:
    ok = is_salem_standard(args.p, args.q, args.precision)
    return CommandOutput(
        "salem-check",
        {"p": args.p, "q": args.q},
        {"is_salem_standard": ok},
        precision_bits=args.precision,
        certified=ok,
        csv_header=("p", "q", "is_salem_standard"),
        csv_rows=[(args.p, args.q, ok)],
        plain_lines=[f"({args.p}, {args.q}) Salem standard: {ok}"],
    )


def _cmd_salem_generate(args) -> CommandOutput:
    if args.t is not None:
        p, q = t_family_params(args.t)
    else:
        if args.p is None or args.q is None:
            raise ValueError("provide either --t or both --p and --q")
        p, q = args.p, args.q
    window = nearest_integer_sequence(p, q, args.count, args.precision)
    terms = _terms_as_strings(window)
    flags = errata_mod.flags_for_command("salem-generate", t=args.t)
    return CommandOutput(
        "salem-generate",
        {"t": args.t, "p": p, "q": q, "count": args.count},
        {"start_index": window.start_index, "terms": terms},
        precision_bits=args.precision,
        certified=True,
        errata_flags=flags,
        csv_header=("n", "term"),
        csv_rows=[(window.start_index + i, t) for i, t in enumerate(terms)],
        plain_lines=[", ".join(terms)],
    )


def _cmd_salem_region(args) -> CommandOutput:
    low, high = region_bounds(args.p)
    return CommandOutput(
        "salem-region",
        {"p": args.p},
        {
            "q_low": str(low),
            "q_high": str(high),
            "q_integers": list(range(math.floor(low) + 1, math.ceil(high))),
        },
        csv_header=("p", "q_low", "q_high"),
        csv_rows=[(args.p, str(low), str(high))],
        plain_lines=[f"p={args.p}: {low} < q < {high}"],
    )


def _verdict_str(value: Optional[bool]) -> str:
    return "undecided" if value is None else str(value).lower()


def _cmd_salem_scan(args) -> CommandOutput:
    cells = enumerate_ldsalem(
        args.p_max,
        precision=args.precision,
        empirical_n=args.empirical_n,
        max_workers=args.workers,
    )
    rows = []
    payload = []
    disagreements = []
    for cell in cells:
        margin = real_ball_payload(cell.verdict.margin, 12)
        entry = {
            "p": cell.p,
            "q": cell.q,
            "in_region": cell.in_region,
            "holds_for_all_n_ge_1": cell.verdict.holds_for_all_n_ge_1,
            "holds_eventually": cell.verdict.holds_eventually,
            "margin": margin,
            "agree": cell.agree,
            "empirical_match": cell.empirical_match,
            "precision_used": cell.verdict.precision_used,
        }
        payload.append(entry)
        if cell.agree is not True:
            disagreements.append(entry)
        rows.append(
            (
                cell.p,
                cell.q,
                cell.in_region,
                _verdict_str(cell.verdict.holds_for_all_n_ge_1),
                _verdict_str(cell.verdict.holds_eventually),
                margin["midpoint"],
                margin["radius_log2"],
                _verdict_str(cell.agree),
                _verdict_str(cell.empirical_match),
            )
        )
    flags = errata_mod.flags_for_command("salem-scan")
    lines = [f"{len(cells)} cells scanned, {len(disagreements)} disagreement(s)"]
    for entry in disagreements:
        lines.append(f"  disagreement at (p={entry['p']}, q={entry['q']}): {entry}")
    return CommandOutput(
        "salem-scan",
        {"p_max": args.p_max, "empirical_n": args.empirical_n},
        {"cells": payload, "disagreements": disagreements},
        precision_bits=args.precision,
        certified=all(c.verdict.holds_for_all_n_ge_1 is not None for c in cells),
        errata_flags=flags,
        csv_header=(
            "p", "q", "in_region", "holds_for_all", "holds_eventually",
            "margin_mid", "margin_radius_log2", "agree", "empirical_match",
        ),
        csv_rows=rows,
        plain_lines=lines,
    )


def _cmd_divcheck(args) -> CommandOutput:
    sources = [
        args.lucas is not None,
        args.terms is not None,
        args.salem is not None,
        args.standard is not None,
    ]
    if sum(sources) != 1:
        raise ValueError("provide exactly one of --lucas, --terms, --salem, --standard")
    if args.lucas is not None:
        h, k = _parse_int_list(args.lucas)
        window = lucas_terms(LucasParams(h, k), args.n)
        label = f"lucas({h},{k})"
    elif args.terms is not None:
        window = SequenceWindow(0, _parse_int_list(args.terms))
        label = "explicit terms"
    elif args.salem is not None:
        p, q = t_family_params(args.salem)
        inner = nearest_integer_sequence(p, q, args.n, args.precision)
        if inner.start_index != 1:
            raise ValueError("nearest-integer sequence does not start at n=1")
        window = SequenceWindow(0, (0,) + inner.terms)
        label = f"salem t={args.salem}"
    else:
        p, q, r = _parse_int_list(args.standard)
        window = standard_terms(StandardParams(p, q, r), args.n)
        label = f"standard({p},{q},{r})"
    violations = divisibility_check(window)
    return CommandOutput(
        "divcheck",
        {"source": label, "n": len(window.terms)},
        {
            "violations": [list(v) for v in violations],
            "is_divisibility_sequence": not violations,
            "terms_checked": len(window.terms),
        },
        certified=not violations,
        csv_header=("m", "n"),
        csv_rows=[list(v) for v in violations],
        plain_lines=[
            f"{label}: {len(violations)} violation(s) in {len(window.terms)} terms"
        ]
        + [f"  a_{m} does not divide a_{n}" for m, n in violations],
    )


def _cmd_oeis(args) -> CommandOutput:
    terms = _parse_int_list(args.terms)
    client = OeisClient(cache_dir=args.cache_dir, fixture_dir=args.fixture_dir)
    result = client.lookup(terms, source_policy=args.policy)
    if not result.ok:
        raise _Unavailable(result.message or "lookup unavailable")
    matches = [
        {
            "sequence_id": m.sequence_id,
            "name": m.name,
            "matched_prefix_length": m.matched_prefix_length,
        }
        for m in result.matches
    ]
    return CommandOutput(
        "oeis",
        {"terms": [str(t) for t in terms], "policy": args.policy},
        {
            "query": result.query,
            "source": result.source.value if result.source else None,
            "matches": matches,
        },
        csv_header=("sequence_id", "name", "matched_prefix_length"),
        csv_rows=[(m["sequence_id"], m["name"], m["matched_prefix_length"]) for m in matches],
        plain_lines=[f"{len(matches)} match(es) [{result.source.value if result.source else '-'}]"]
        + [f"  {m['sequence_id']}: {m['name']}" for m in matches],
    )


def _cmd_errata(args) -> CommandOutput:
    del args
    entries = [e.as_dict() for e in errata_mod.all_errata()]
    return CommandOutput(
        "errata",
        {},
        {"entries": entries},
        csv_header=("flag", "summary"),
        csv_rows=[(e["flag"], e["summary"]) for e in entries],
        plain_lines=[f"{e['flag']}: {e['summary']}" for e in entries],
    )


class _Unavailable(RuntimeError):
    pass


# -- argument parsing -------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lds4",
        description="Order-4 linear divisibility sequences: composition, "
        "factorization, recognition, and Salem-number generation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--format",
        choices=("json", "csv", "plain"),
        default="json",
        help="output format (default: json)",
    )
    common.add_argument(
        "--precision",
        type=int,
        default=_default_precision(),
        help=f"working precision in bits (default: {PRECISION_ENV_VAR} or {DEFAULT_PRECISION})",
    )

    p_lucas = sub.add_parser("lucas", parents=[common], help="Lucas sequence terms")
    p_lucas.add_argument("--h", type=int, required=True)
    p_lucas.add_argument("--k", type=int, required=True)
    p_lucas.add_argument("--count", type=int, default=10)
    p_lucas.set_defaults(func=_cmd_lucas)

    p_comp = sub.add_parser(
        "compose", parents=[common], help="product of two Lucas LDSs as a standard LDS"
    )
    for name in ("h1", "k1", "h2", "k2"):
        p_comp.add_argument(f"--{name}", type=int, required=True)
    p_comp.add_argument("--count", type=int, default=10)
    p_comp.set_defaults(func=_cmd_compose)

    p_factor = sub.add_parser(
        "factor", parents=[common], help="factor a standard quartic over C"
    )
    p_factor.add_argument("--p", type=int, required=True)
    p_factor.add_argument("--q", type=int, required=True)
    p_factor.add_argument("--r", type=int, required=True)
    p_factor.add_argument("--verify-n", type=int, default=20, dest="verify_n")
    p_factor.set_defaults(func=_cmd_factor)

    p_salem = sub.add_parser("salem", help="Salem standard quartic tools")
    salem_sub = p_salem.add_subparsers(dest="salem_command", required=True)

    p_check = salem_sub.add_parser("check", parents=[common])
    p_check.add_argument("--p", type=int, required=True)
    p_check.add_argument("--q", type=int, required=True)
    p_check.set_defaults(func=_cmd_salem_check)

    p_gen = salem_sub.add_parser("generate", parents=[common])
    p_gen.add_argument("--t", type=int, default=None)
    p_gen.add_argument("--p", type=int, default=None)
    p_gen.add_argument("--q", type=int, default=None)
    p_gen.add_argument("--count", type=int, default=10)
    p_gen.set_defaults(func=_cmd_salem_generate)

    p_region = salem_sub.add_parser("region", parents=[common])
    p_region.add_argument("--p", type=int, required=True)
    p_region.set_defaults(func=_cmd_salem_region)

    p_scan = salem_sub.add_parser("scan", parents=[common])
    p_scan.add_argument("--p-max", type=int, default=12, dest="p_max")
    p_scan.add_argument("--empirical-n", type=int, default=40, dest="empirical_n")
    p_scan.add_argument("--workers", type=int, default=None)
    p_scan.set_defaults(func=_cmd_salem_scan)

    p_div = sub.add_parser(
        "divcheck", parents=[common], help="divisibility-property check"
    )
    p_div.add_argument("--lucas", help="h,k")
    p_div.add_argument("--terms", help="explicit comma-separated window from index 0")
    p_div.add_argument("--salem", type=int, help="t value of the one-parameter family")
    p_div.add_argument("--standard", help="p,q,r")
    p_div.add_argument("--n", type=int, default=30)
    p_div.set_defaults(func=_cmd_divcheck)

    p_oeis = sub.add_parser("oeis", parents=[common], help="OEIS lookup")
    p_oeis.add_argument("--terms", required=True)
    p_oeis.add_argument(
        "--policy",
        choices=("cache-first", "live", "cache-only", "fixture"),
        default="cache-first",
    )
    p_oeis.add_argument("--cache-dir", default=None)
    p_oeis.add_argument("--fixture-dir", default=None)
    p_oeis.set_defaults(func=_cmd_oeis)

    p_err = sub.add_parser(
        "errata", parents=[common], help="known published-source discrepancies"
    )
    p_err.set_defaults(func=_cmd_errata)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    command = getattr(args, "command", "?")
    try:
        output = args.func(args)
    except (ValueError, DegenerateInputError) as exc:
        print(_error_payload(command, exc, EXIT_VALIDATION), file=sys.stderr)
        return EXIT_VALIDATION
    except CertificationError as exc:
        print(_error_payload(command, exc, EXIT_PRECISION), file=sys.stderr)
        return EXIT_PRECISION
    except (_Unavailable, OeisResponseError) as exc:
        print(_error_payload(command, exc, EXIT_UNAVAILABLE), file=sys.stderr)
        return EXIT_UNAVAILABLE
    print(output.render(args.format))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
