"""Command-line front end: polykernel <subcommand> [options].

Exact results are printed as p/q.  Exit status is 0 on success, 2 when an
input cannot be parsed and 3 when the input is well formed but outside the
supported domain (unbounded, infeasible, over a scale guard).
"""

import argparse
import logging
import os
import random
import sys
from fractions import Fraction

from . import dancing_links, handelman, integrate, knapsack, optimize
from .exact_arith import format_rational
from .polyhedra import DomainError, Polytope, parse_hrep
from .polynomial import parse_polynomial

EXIT_PARSE = 2
EXIT_DOMAIN = 3
MODULES = ("exact_arith", "polynomial", "polyhedra", "integrate", "handelman",
           "optimize", "knapsack", "dancing_links", "cli")

log = logging.getLogger("polykernel")


class ParseFailure(Exception):
    pass


def _read(path):
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise ParseFailure(f"cannot read {path}: {exc.strerror}") from None


def _parse(what, fn, text):
    try:
        return fn(text)
    except DomainError:
        raise
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise ParseFailure(f"{what}: {exc}") from None


def parse_vertices(text):
    """First line "n d", then n points with d rational coordinates each."""
    lines = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    n, d = int(lines[0][0]), int(lines[0][1])
    pts = [[Fraction(x) for x in ln] for ln in lines[1:1 + n]]
    if len(pts) != n or any(len(p) != d for p in pts):
        raise ValueError("vertex list does not match its header")
    return Polytope.from_points(pts)


def _polytope(args):
    if getattr(args, "polytope", None):
        return _parse("polyhedra", parse_hrep, _read(args.polytope))
    if getattr(args, "vertices", None):
        return _parse("polyhedra", parse_vertices, _read(args.vertices))
    raise ParseFailure("give --polytope (H-representation) or --vertices")


def _poly(args, dim):
    return _parse("polynomial", lambda t: parse_polynomial(t, dim), _read(args.poly))


def _fmt(q, decimal=False):
    text = format_rational(q)
    if decimal:
        text += f"\t{float(q):.12g}"
    return text


def _method(name):
    return integrate.CONE if name in ("cone", integrate.CONE) else integrate.TRIANGULATION


# subcommands -------------------------------------------------------------------

def cmd_integrate(args, out):
    P = _polytope(args)
    f = _poly(args, P.dim)
    value = integrate.integrate_polynomial(P, f, _method(args.method), args.jobs)
    print(_fmt(value, args.decimal), file=out)


def cmd_volume(args, out):
    P = _polytope(args)
    print(_fmt(P.volume(), args.decimal), file=out)


def cmd_handelman(args, out):
    P = _polytope(args)
    f = _poly(args, P.dim)
    if args.bound:
        b = handelman.handelman_bound(f, P, args.degree)
        print("inf" if b == float("inf") else _fmt(b, args.decimal), file=out)
        return
    dec = handelman.handelman_decompose(f, P, args.degree)
    if dec is None:
        raise DomainError(f"handelman: no degree-{args.degree} decomposition")
    print(f"shift {format_rational(dec.shift)}", file=out)
    print(f"objective {format_rational(dec.objective)}", file=out)
    for alpha, c in sorted(dec.terms.items()):
        print(f"{format_rational(c)} {' '.join(map(str, alpha))}", file=out)
    if args.integrate_power is not None:
        value = handelman.integrate_handelman_terms(dec, P, args.integrate_power)
        print(f"integral {_fmt(value, args.decimal)}", file=out)


def cmd_bounds(args, out):
    P = _polytope(args)
    f = _poly(args, P.dim)
    for k in args.k:
        if args.discrete:
            box = P.box_bounds()
            if box is None:
                raise DomainError("optimize: discrete bounds need a box domain")
            res = optimize.discrete_bounds_box(f, box[0], box[1], k)
        else:
            res = optimize.continuous_bounds(f, P, k, method=_method(args.method), jobs=args.jobs)
        print(f"{k}\t{res.L_k.decimal(args.digits)}\t{res.U_k.decimal(args.digits)}", file=out)
        if args.exact:
            print(f"#\tL_k = {res.L_k}\tU_k = {res.U_k}", file=out)


def _knapsack(args):
    return _parse("knapsack", knapsack.parse_knapsack, _read(args.knapsack))


def cmd_topk(args, out):
    q = knapsack.top_coefficients(_knapsack(args), args.k, args.jobs)
    print(knapsack.format_topk(q), file=out)


def cmd_evaluate(args, out):
    a = _knapsack(args)
    q = knapsack.top_coefficients(a, args.k if args.k is not None else len(a) - 1, args.jobs)
    for t in args.t:
        line = f"{t}\t{format_rational(knapsack.evaluate_topk(q, t))}"
        if args.oracle:
            line += f"\t{knapsack.denumerant_oracle(a, t)}"
        print(line, file=out)


def cmd_coset_polys(args, out):
    polys = knapsack.coset_polynomials(_knapsack(args))
    print(knapsack.format_coset_polynomials(polys), file=out)


def cmd_dlx(args, out):
    if args.milp:
        milp = _parse("dancing_links", dancing_links.parse_milp, _read(args.milp))
        y0 = dancing_links.solve_partition(milp, args.select)
        out.write(dancing_links.format_milp(dancing_links.fix_and_reduce(milp, y0)))
        return
    rows = _parse("dancing_links", dancing_links.parse_set_partition, _read(args.file))
    res = dancing_links.solve_exact_cover(rows, args.select, args.check)
    if not res.feasible:
        raise DomainError("dancing_links: system is infeasible")
    print(dancing_links.format_solution(res.solution), file=out)


# parser ---------------------------------------------------------------------------

def build_parser():
    def common(parser, default):
        # accepted before or after the subcommand; the subparser copy must not clobber the top-level value
        kw = {} if default else {"default": argparse.SUPPRESS}
        parser.add_argument("--seed", type=int, help="orders diagnostics only; results never depend on it", **kw)
        parser.add_argument("--jobs", type=int, help="worker processes for parallel sums", **kw)
        parser.add_argument("--decimal", action="store_true", help="append a decimal column", **kw)
        parser.add_argument("-o", "--output", help="write results here instead of stdout", **kw)
        parser.add_argument("-v", "--verbose", action="store_true", **kw)

    p = argparse.ArgumentParser(prog="polykernel", description=__doc__.splitlines()[0])
    common(p, True)
    p.set_defaults(seed=0, jobs=1)
    shared = argparse.ArgumentParser(add_help=False)
    common(shared, False)
    sub = p.add_subparsers(dest="command", required=True)
    _add = sub.add_parser

    def add_parser(name, **kw):
        return _add(name, parents=[shared], **kw)
    sub.add_parser = add_parser

    def geometry(sp):
        g = sp.add_mutually_exclusive_group(required=True)
        g.add_argument("--polytope", help="H-representation file")
        g.add_argument("--vertices", help="vertex list file")

    sp = sub.add_parser("integrate", help="exact integral of a polynomial over a polytope")
    geometry(sp)
    sp.add_argument("--poly", required=True)
    sp.add_argument("--method", choices=["triangulation", "cone"], default="triangulation")
    sp.set_defaults(func=cmd_integrate)

    sp = sub.add_parser("volume", help="exact volume")
    geometry(sp)
    sp.set_defaults(func=cmd_volume)

    sp = sub.add_parser("handelman", help="Handelman decomposition or bound")
    geometry(sp)
    sp.add_argument("--poly", required=True)
    sp.add_argument("--degree", "-t", type=int, required=True)
    sp.add_argument("--bound", action="store_true", help="print the order-t Handelman upper bound instead")
    sp.add_argument("--integrate-power", type=int, help="also integrate (f+s)^k through the terms")
    sp.set_defaults(func=cmd_handelman)

    sp = sub.add_parser("bounds", help="L_k / U_k bounds on the maximum")
    geometry(sp)
    sp.add_argument("--poly", required=True)
    sp.add_argument("-k", type=int, nargs="+", required=True)
    sp.add_argument("--discrete", action="store_true", help="bounds over the lattice points of a box")
    sp.add_argument("--method", choices=["triangulation", "cone"], default="triangulation")
    sp.add_argument("--digits", type=int, default=optimize.DIGITS)
    sp.add_argument("--exact", action="store_true", help="also print the radicals")
    sp.set_defaults(func=cmd_bounds)

    sp = sub.add_parser("topk", help="top coefficients of a knapsack denumerant")
    sp.add_argument("--knapsack", required=True)
    sp.add_argument("-k", type=int, required=True)
    sp.set_defaults(func=cmd_topk)

    sp = sub.add_parser("evaluate", help="evaluate the top-k approximation at t")
    sp.add_argument("--knapsack", required=True)
    sp.add_argument("-k", type=int)
    sp.add_argument("-t", type=int, nargs="+", required=True)
    sp.add_argument("--oracle", action="store_true", help="also print the exact count")
    sp.set_defaults(func=cmd_evaluate)

    sp = sub.add_parser("coset-polys", help="full quasi-polynomial, one polynomial per residue class")
    sp.add_argument("--knapsack", required=True)
    sp.set_defaults(func=cmd_coset_polys)

    sp = sub.add_parser("dlx", help="exact-cover search or MILP fix-and-reduce")
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--file", help="set-partition system")
    g.add_argument("--milp", help="MILP with a PARTITION block")
    sp.add_argument("--select", choices=sorted(dancing_links.POLICIES), default="fewest")
    sp.add_argument("--check", action="store_true", help="verify every cover/uncover restores the links")
    sp.set_defaults(func=cmd_dlx)
    return p


def _origin(exc):
    """Name of the package module that raised exc."""
    name = "cli"
    tb = exc.__traceback__
    while tb is not None:
        path = tb.tb_frame.f_code.co_filename
        if os.path.dirname(path) == os.path.dirname(__file__):
            name = os.path.splitext(os.path.basename(path))[0]
        tb = tb.tb_next
    return name


def run(argv=None, out=None):
    """Parse argv, execute one subcommand and return the exit status."""
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_PARSE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    notes = [f"command={args.command}", f"jobs={args.jobs}", f"seed={args.seed}"]
    random.Random(args.seed).shuffle(notes)
    for n in notes:
        log.info(n)
    if args.jobs < 1:
        print("error: --jobs must be positive", file=sys.stderr)
        return EXIT_PARSE
    try:
        if args.output:
            with open(args.output, "w") as fh:
                args.func(args, fh)
        else:
            args.func(args, out)
    except ParseFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except DomainError as exc:
        msg = str(exc)
        origin = _origin(exc)
        if msg.split(":", 1)[0] not in MODULES:
            msg = f"{origin}: {msg}"
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_DOMAIN
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
