"""``opch`` command line.

Exit codes: 0 success, 1 a check failed, 2 usage, parse or IO error.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import List, Optional

from .errors import NotInImage, OpchError
from .terms import Expr, format_term, parse_term, weight

DEFAULT_CACHE = ".opch-cache"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="opch", description="Weight -1 computations in varieties with a derivation.")
    p.add_argument("--cache-dir", help=f"basis cache (default: $OPCH_CACHE_DIR or ./{DEFAULT_CACHE})")
    p.add_argument("--no-cache", action="store_true", help="compute everything in memory")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("wt", help="weight of a homogeneous element")
    s.add_argument("expr")

    s = sub.add_parser("tau", help="expand a >/< term")
    s.add_argument("diexpr")

    s = sub.add_parser("nf", help="normal form modulo a variety")
    s.add_argument("--variety", required=True)
    s.add_argument("expr")

    for name, help_ in (("dim", "dimension of the multilinear component"),
                        ("dim-der", "dimension of the derived operad (rank of the expansion)"),
                        ("criterion", "weight criterion: rank equals component dimension")):
        s = sub.add_parser(name, help=help_)
        s.add_argument("--variety", required=True)
        s.add_argument("--arity", type=int, required=True)

    s = sub.add_parser("check-identities", help="expand the identities of a derived variety")
    s.add_argument("--derived", required=True)

    s = sub.add_parser("express", help="rewrite a weight -1 element with > and <")
    s.add_argument("--variety", required=True)
    s.add_argument("--method", choices=("solver", "recursive"), default="solver")
    s.add_argument("--max-arity", type=int, default=None)
    s.add_argument("expr")

    s = sub.add_parser("report", help="run every reproduction check and write JSON")
    s.add_argument("--max-arity", type=int, default=5)
    s.add_argument("--out", required=True)
    return p


def _setup_cache(args) -> None:
    from .varieties import set_cache_dir

    if args.no_cache:
        set_cache_dir(None)
        return
    set_cache_dir(args.cache_dir or os.environ.get("OPCH_CACHE_DIR") or DEFAULT_CACHE)


def _nf(variety: str, e: Expr) -> Expr:
    from .varieties import bicom_normal_form, catalog, component

    v = catalog(variety)
    if not e:
        return e
    if v.name == "BiCom":
        return bicom_normal_form(e)
    n = e.monomials()[0].arity
    w = None if v.num_ops == 2 else weight(e)
    comp = component(v.name, n, w)
    basis = comp.basis_monomials()
    return Expr((basis[i], c) for i, c in enumerate(comp.coordinates(e)) if c)


def _run(args, out) -> int:
    from . import derived, express, report, varieties

    cmd = args.command
    if cmd == "wt":
        print(weight(parse_term(args.expr)), file=out)
    elif cmd == "tau":
        print(format_term(derived.tau(parse_term(args.diexpr))), file=out)
    elif cmd == "nf":
        print(format_term(_nf(args.variety, parse_term(args.expr))), file=out)
    elif cmd == "dim":
        v = varieties.catalog(args.variety)
        print(varieties.component(v.name, args.arity).plain_dim, file=out)
    elif cmd == "dim-der":
        print(derived.dim_dervar(varieties.catalog(args.variety).name, args.arity), file=out)
    elif cmd == "criterion":
        name = varieties.catalog(args.variety).name
        rank, dim = derived.criterion_data(name, args.arity)
        ok = rank == dim
        print(f"{name} n={args.arity}: rank {rank}, component dim {dim}: {'holds' if ok else 'fails'}", file=out)
        return 0 if ok else 1
    elif cmd == "check-identities":
        rep = derived.check_di_identities(args.derived)
        for label, coords in rep.identity_coordinates:
            print(f"{label}: {'vanishes' if not coords else 'nonzero'}", file=out)
        print(f"span dim {rep.span_dim} (expected {rep.expected_span_dim}), "
              f"in kernel: {'yes' if rep.span_in_kernel else 'no'}", file=out)
        return 0 if rep.ok else 1
    elif cmd == "express":
        f = parse_term(args.expr)
        kw = {} if args.max_arity is None else {"max_arity": args.max_arity}
        trace: list = []
        try:
            t = express.express(args.variety, f, method=args.method, trace=trace, **kw)
        except NotInImage as e:
            print(f"not expressible: {e}", file=sys.stderr)
            return 1
        print(format_term(t), file=out)
        for item in trace:
            print(f"solver fallback: {item['monomial']} ({item['reason']})", file=sys.stderr)
    elif cmd == "report":
        rep = report.run_report(args.max_arity)
        try:
            report.write_report(rep, args.out)
        except OSError as e:
            print(f"opch: cannot write {args.out}: {e}", file=sys.stderr)
            return 2
        s = rep.summary()
        print(f"{s['passed']}/{s['total']} checks passed, report written to {args.out}", file=out)
        for r in rep.failed:
            print(f"FAIL {r.check_id}: expected {r.expected!r}, computed {r.computed!r}", file=out)
        return 0 if rep.ok else 1
    return 0


def main(argv: Optional[List[str]] = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    if args.command == "report":
        # fail on an unwritable destination before spending minutes on checks
        target = Path(args.out)
        if not target.parent.is_dir() or (target.exists() and not os.access(target, os.W_OK)):
            print(f"opch: cannot write {args.out}", file=sys.stderr)
            return 2
        if args.max_arity < 2:
            print("opch: --max-arity must be at least 2", file=sys.stderr)
            return 2
    try:
        _setup_cache(args)
        return _run(args, out)
    except OpchError as e:
        print(f"opch: {type(e).__name__}: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"opch: {e}", file=sys.stderr)
        return 2


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
