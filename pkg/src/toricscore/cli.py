"""Command-line entry point.

Exit codes: 0 every query succeeded, 2 parse or validation failure, 3 at least
one query raised an error.
"""

from __future__ import annotations

import argparse
import sys

from toricscore import __version__
from toricscore.errors import ProblemParseError
from toricscore.io import Query, _class_spec, exit_code, parse_problem, report_json, report_text, run_queries


def _class_arg(text: str):
    text = text.strip()
    if text.startswith("D"):
        return text
    return [t.strip() for t in text.split(",")]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("problem", help="problem file (JSON)")
    common.add_argument("--output", choices=("json", "text"), default="json")
    common.add_argument("--allow-hypothesis-violations", dest="allow", action="store_true", default=True,
                        help="evaluate even when m > n-3 (default; the warning is always reported)")
    common.add_argument("--strict-hypotheses", dest="allow", action="store_false",
                        help="turn an m > n-3 violation into a query error")

    p = argparse.ArgumentParser(prog="toricscore", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"toricscore {__version__}")
    sub = p.add_subparsers(dest="verb", required=True)
    sub.add_parser("run", parents=[common], help="run every query in the file")
    sub.add_parser("validate", parents=[common], help="validate the fan and the deformation")
    sub.add_parser("ring", parents=[common], help="SR(V,E) generators and graded dimensions")
    for verb, flag in (("product", "--sigma"), ("intersect", "--class"), ("score", "--sigma")):
        sp = sub.add_parser(verb, parents=[common],
                            help=f"{verb} queries from the file, or one built from {flag} options")
        sp.add_argument(flag, dest="classes", action="append", type=_class_arg, default=None,
                        help="comma-separated rationals (e.g. 1,0 or 1/2,3) or D<i>; repeat per slot")
        if verb == "score":
            sp.add_argument("--hypersurface", dest="hypersurfaces", action="append", default=None,
                            help="label of a hypersurface to intersect (default: all, in file order)")
            sp.add_argument("--consistency", action="store_true",
                            help="also check every stepwise insertion order")
    return p


def _adhoc_query(args, pf) -> Query:
    n = pf.fan.dim
    rank = pf.fan.nrays - n
    classes = tuple(_class_spec(c, rank, pf.fan.nrays, f"argument {i + 1}")
                    for i, c in enumerate(args.classes))
    if args.verb == "score":
        labels = [h.label for h in pf.hypersurfaces]
        hs = tuple(args.hypersurfaces) if args.hypersurfaces else tuple(labels)
        unknown = [h for h in hs if h not in labels]
        if unknown:
            raise ProblemParseError(f"unknown hypersurface {unknown[0]!r}", "--hypersurface")
        if len(classes) != n - len(hs):
            raise ProblemParseError(f"expected {n - len(hs)} classes, got {len(classes)}", "--sigma")
        return Query("score", classes, hs, args.consistency)
    if len(classes) != n:
        raise ProblemParseError(f"expected {n} classes, got {len(classes)}", "--sigma/--class")
    return Query(args.verb, classes)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        pf = parse_problem(args.problem)
        if args.verb == "run":
            queries = None
        elif getattr(args, "classes", None):
            queries = (_adhoc_query(args, pf),)
        else:
            queries = tuple(q for q in pf.queries if q.kind == args.verb)
            if not queries and args.verb in ("validate", "ring"):
                queries = (Query(args.verb),)
    except ProblemParseError as exc:
        print(f"toricscore: parse error: {exc}", file=sys.stderr)
        return 2
    report = run_queries(pf, allow_hypothesis_violations=args.allow, queries=queries)
    out = report_json(report) if args.output == "json" else report_text(report)
    sys.stdout.write(out)
    return exit_code(report)


if __name__ == "__main__":
    sys.exit(main())
