"""Command-line entry point.

Subcommands expose every pipeline with reproducible, machine-readable
output: identical invocations produce byte-identical bytes. Data goes to
standard output (or --output), progress and diagnostics to standard error.
Integers inside JSON are decimal strings throughout, since blocking-system
values overflow 64-bit words by a wide margin.

Exit codes: 0 success, 1 internal/budget errors, 2 hypothesis violations,
64 usage errors.

Conventions baked into the outputs: 0 and 1 count as sums of two squares,
and every bound is inclusive (members <= x).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__
from .admissibility import admissible_classes
from .arith import FactoredInteger, factorize
from .census import PatternSpec, census_report, match_pattern
from .errors import HypothesisViolation, TwoSqError
from .forcing import bin_plan, construct_two_class_tuple, delta_constant, end_to_end_triple
from .sieve import DEFAULT_SEGMENT_LEN, sieve_segment
from .witness import TripleCertificate, build_witness_family, check_local_obstructions, scan_family

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_HYPOTHESIS = 2
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _json_dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _status(msg: str) -> None:
    print(msg, file=sys.stderr)


def _csv_field(text: str) -> str:
    return f'"{text}"' if "," in text else text


def _pattern_label(classes) -> str:
    return "[" + ",".join(str(c) for c in classes) + "]"


def _parse_classes(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError as exc:
        raise ValueError(f"bad class list {text!r}") from exc


def _common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--format", choices=("csv", "json", "jsonl"), default=None)
    sub.add_argument("--output", metavar="PATH", default=None)
    sub.add_argument("--segment-length", type=int, default=DEFAULT_SEGMENT_LEN)
    sub.add_argument("--workers", type=int, default=1)
    sub.add_argument(
        "--cache-dir",
        default=os.environ.get("TWOSQ_CACHE_DIR"),
        help="directory for sieve bitmap dumps (env: TWOSQ_CACHE_DIR)",
    )


def _cmd_sieve(args) -> int:
    lines = []
    if args.dump:
        # the dump format is a single segment, so build the range as one
        seg = sieve_segment(args.lo, args.hi, cache_dir=args.cache_dir)
        seg.save(args.dump)
        lines = [str(v) for v in seg.members().tolist()]
    else:
        lo = args.lo
        while lo < args.hi:
            hi = min(lo + args.segment_length, args.hi)
            seg = sieve_segment(lo, hi, cache_dir=args.cache_dir)
            lines.extend(str(v) for v in seg.members().tolist())
            lo = hi
    fmt = args.format or "csv"
    if fmt == "json":
        _emit(
            _json_dumps({"lo": str(args.lo), "hi": str(args.hi), "members": lines}) + "\n",
            args.output,
        )
    else:
        _emit("value\n" + "".join(line + "\n" for line in lines), args.output)
    _status(f"{len(lines)} members in [{args.lo}, {args.hi})")
    return EXIT_OK


def _cmd_admissible(args) -> int:
    q = factorize(args.q)
    classes = [str(c.value) for c in admissible_classes(q)]
    fmt = args.format or "csv"
    if fmt == "json":
        _emit(_json_dumps({"q": str(args.q), "admissible": classes}) + "\n", args.output)
    else:
        _emit(",".join(classes) + "\n", args.output)
    return EXIT_OK


def _cmd_census(args) -> int:
    q = factorize(args.q)
    report = census_report(
        q,
        args.r,
        args.x,
        segment_len=args.segment_length,
        cache_dir=args.cache_dir,
        workers=args.workers,
    )
    fmt = args.format or "csv"
    if fmt == "json":
        patterns = []
        for tup in report.pattern_universe():
            entry = {
                "pattern": [str(c) for c in tup],
                "count": str(report.count_for(tup)),
            }
            occ = report.occurrences.get(tup)
            if occ:
                entry["first_n"] = str(occ[0].n)
                entry["first_values"] = [str(v) for v in occ[0].values]
            patterns.append(entry)
        _emit(
            _json_dumps(
                {
                    "q": str(report.q),
                    "r": str(report.r),
                    "x": str(report.x),
                    "total_windows": str(report.total_windows),
                    "patterns": patterns,
                }
            )
            + "\n",
            args.output,
        )
    else:
        rows = ["pattern,count"]
        for tup in report.pattern_universe():
            rows.append(f"{_csv_field(_pattern_label(tup))},{report.count_for(tup)}")
        _emit("".join(r + "\n" for r in rows), args.output)
    _status(f"{report.total_windows} windows over {len(report.counts)} observed patterns")
    return EXIT_OK


def _cmd_pattern(args) -> int:
    q = factorize(args.q)
    classes = _parse_classes(args.classes)
    spec = PatternSpec(q, classes)
    result = match_pattern(
        spec,
        args.x,
        segment_len=args.segment_length,
        cache_dir=args.cache_dir,
        workers=args.workers,
    )
    fmt = args.format or "csv"
    if fmt == "json":
        _emit(
            _json_dumps(
                {
                    "q": str(args.q),
                    "pattern": [str(c) for c in classes],
                    "x": str(args.x),
                    "count": str(result.count),
                    "occurrences": [
                        {"n": str(o.n), "values": [str(v) for v in o.values]}
                        for o in result.occurrences
                    ],
                }
            )
            + "\n",
            args.output,
        )
    else:
        _emit(
            "pattern,count\n"
            f"{_csv_field(_pattern_label(classes))},{result.count}\n",
            args.output,
        )
    return EXIT_OK


def _cmd_witness(args) -> int:
    q = factorize(args.q)
    family = build_witness_family(q, args.a, args.h, args.k)
    check_local_obstructions(family)
    _status(
        f"family: T={family.T} F(t) = {family.A}t^2 + {family.B}t + {family.C + family.k}"
    )
    result = scan_family(family, args.tmax)
    lines = [json.dumps(c.to_json_dict(), sort_keys=True) for c in result.certificates]
    _emit("".join(line + "\n" for line in lines), args.output)
    _status(
        f"{len(result.certificates)} certificates, {len(result.skipped_t)} skipped, t <= {args.tmax}"
    )
    return EXIT_OK


def _cmd_force_triple(args) -> int:
    q = factorize(args.q)
    report = end_to_end_triple(
        q,
        args.a,
        args.b,
        args.c,
        x_budget=args.xbudget,
        segment_len=args.segment_length,
        cache_dir=args.cache_dir,
    )
    _emit(
        _json_dumps(
            {
                "q": str(report.q),
                "pattern": [str(v) for v in report.pattern],
                "x_budget": str(report.x_budget),
                "count": str(report.count),
                "occurrences": [
                    {"n": str(o.n), "values": [str(v) for v in o.values]}
                    for o in report.occurrences
                ],
                "certificates": [c.to_json_dict() for c in report.certificates],
                "blocking_system": report.blocking.to_json_dict(),
            }
        )
        + "\n",
        args.output,
    )
    _status(f"{report.count} occurrences below {report.x_budget}")
    return EXIT_OK


def _cmd_tuple(args) -> int:
    q = factorize(args.q)
    if args.sizes:
        sizes = list(_parse_classes(args.sizes))
        delta = None
    else:
        sizes = bin_plan(args.M, args.theta1, args.theta2)
        delta = delta_constant(args.theta1, args.theta2)
    design = construct_two_class_tuple(q, args.a, args.b, args.j, sizes)
    payload = {
        "q": str(design.q),
        "a": str(design.a),
        "b": str(design.b),
        "j": str(design.j),
        "M": str(design.M),
        "bins": [str(s) for s in design.bins],
        "offsets": [str(h) for h in design.offsets],
        "transition_index": str(design.transition_index),
    }
    if delta is not None:
        payload["delta"] = repr(delta)
    _emit(_json_dumps(payload) + "\n", args.output)
    return EXIT_OK


def _cmd_verify(args) -> int:
    if args.path and args.path != "-":
        with open(args.path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    else:
        lines = sys.stdin.read().splitlines()
    total = 0
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        cert = TripleCertificate.from_json_dict(json.loads(line))
        if not cert.verify():
            _status(f"line {lineno}: certificate failed verification")
            return EXIT_INTERNAL
        total += 1
    _status(f"{total} certificates verified")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="twosq",
        description="Sums of two squares: enumeration, pattern census, witnesses.",
        epilog=(
            "Conventions: 0 and 1 count as sums of two squares (0 = 0^2 + 0^2), "
            "and every bound is inclusive (members <= x)."
        ),
    )
    parser.add_argument("--version", action="version", version=f"twosq {__version__}")
    subs = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = subs.add_parser("sieve", help="enumerate members of E in [lo, hi)")
    p.add_argument("lo", type=int)
    p.add_argument("hi", type=int)
    p.add_argument("--dump", metavar="PATH", help="write the raw bitmap dump")
    _common_flags(p)
    p.set_defaults(func=_cmd_sieve)

    p = subs.add_parser("admissible", help="admissible classes mod q")
    p.add_argument("q", type=int)
    _common_flags(p)
    p.set_defaults(func=_cmd_admissible)

    p = subs.add_parser("census", help="all-pattern census N(x;q,a) for length r")
    p.add_argument("q", type=int)
    p.add_argument("r", type=int)
    p.add_argument("x", type=int)
    _common_flags(p)
    p.set_defaults(func=_cmd_census)

    p = subs.add_parser("pattern", help="count one pattern, e.g. pattern 4 1,2 10")
    p.add_argument("q", type=int)
    p.add_argument("classes", help="comma-separated residue classes")
    p.add_argument("x", type=int)
    _common_flags(p)
    p.set_defaults(func=_cmd_pattern)

    p = subs.add_parser("witness", help="build the quadratic family and scan it")
    p.add_argument("q", type=int)
    p.add_argument("a", type=int)
    p.add_argument("h", type=int)
    p.add_argument("k", type=int)
    p.add_argument("--tmax", type=int, default=100)
    _common_flags(p)
    p.set_defaults(func=_cmd_witness)

    p = subs.add_parser("force-triple", help="blocking system plus census triples")
    p.add_argument("q", type=int)
    p.add_argument("a", type=int)
    p.add_argument("b", type=int)
    p.add_argument("c", type=int)
    p.add_argument("--xbudget", type=int, default=10_000_000)
    _common_flags(p)
    p.set_defaults(func=_cmd_force_triple)

    p = subs.add_parser("tuple", help="two-class offset tuple from a bin plan")
    p.add_argument("q", type=int)
    p.add_argument("a", type=int)
    p.add_argument("b", type=int)
    p.add_argument("j", type=int)
    p.add_argument("M", type=int)
    p.add_argument("theta1", type=float)
    p.add_argument("theta2", type=float)
    p.add_argument("--sizes", help="explicit bin sizes, bypassing the plan minima")
    _common_flags(p)
    p.set_defaults(func=_cmd_tuple)

    p = subs.add_parser("verify", help="re-verify JSONL certificates (file or stdin)")
    p.add_argument("path", nargs="?", default="-")
    _common_flags(p)
    p.set_defaults(func=_cmd_verify)

    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        if args.workers < 1:
            parser.error("--workers must be >= 1")
        return args.func(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except HypothesisViolation as exc:
        print(
            json.dumps({"error": "hypothesis_violation", "detail": str(exc)}),
            file=sys.stderr,
        )
        return EXIT_HYPOTHESIS
    except ValueError as exc:
        print(json.dumps({"error": "bad_argument", "detail": str(exc)}), file=sys.stderr)
        return EXIT_USAGE
    except TwoSqError as exc:
        print(
            json.dumps({"error": type(exc).__name__, "detail": str(exc)}),
            file=sys.stderr,
        )
        return EXIT_INTERNAL


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
