"""Exact integration of powers of linear forms and affine products over polytopes.

Two domain decompositions are offered and must agree exactly: a triangulation
of the polytope into simplices, and a decomposition into the (triangulated)
tangent cones at the vertices.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

from .exact_arith import TruncatedSeries, inverse_linear_series, residue_coeff, exp_series
from .polyhedra import (DomainError, columns_to_matrix, det, dot, find_regular_vector,
                        simplex_volume, tangent_cone, triangulate_cone,
                        triangulate_polytope)
from .polynomial import to_linear_forms

TRIANGULATION = "triangulation"
CONE = "cone_decomposition"
METHODS = (TRIANGULATION, CONE)


@dataclass(frozen=True)
class IntegrationResult:
    value: Fraction
    method: str
    term_count: int


def _binomial_head(v, n, upto):
    """Coefficients of eps^0..eps^upto in (v + eps)^n."""
    return [comb(n, j) * v ** (n - j) if j <= n else Fraction(0) for j in range(upto + 1)]


def _series_coeff(coeffs, factors, order):
    """Coefficient of eps^order in (sum coeffs_j eps^j) * prod(factors)."""
    s = TruncatedSeries(1, order, {(j,): c for j, c in enumerate(coeffs) if c})
    for f in factors:
        s = s * f
    return s.coefficient((order,))


# simplices -------------------------------------------------------------------

def simplex_residue_terms(verts, form, M, pick="first"):
    """Per-pole terms of the simplex formula, before the common prefactor.

    Vertices sharing a value <l, s_i> form one pole; ``pick`` selects which of
    them stands for the group ("first" or "last" occurrence).
    """
    form = [Fraction(x) for x in form]
    d = len(form)
    values = [dot(form, s) for s in verts]
    groups = {}
    for i, v in enumerate(values):
        groups.setdefault(v, []).append(i)
    reps = []
    for v, members in groups.items():
        rep = members[0] if pick == "first" else members[-1]
        reps.append((rep, v, len(members)))
    reps.sort()
    terms = []
    for rep, vk, mk in reps:
        factors = []
        for _, vi, mi in reps:
            if vi == vk:
                continue
            inv = inverse_linear_series(vk - vi, 1, mk - 1)
            factors.append(inv ** mi)
        head = _binomial_head(vk, M + d, mk - 1)
        terms.append((rep, _series_coeff(head, factors, mk - 1)))
    return terms


def integrate_plf_simplex(verts, form, M, pick="first"):
    """Integral of <form, x>^M over the simplex with the given d+1 vertices."""
    verts = [tuple(Fraction(x) for x in v) for v in verts]
    d = len(form)
    if len(verts) != d + 1:
        raise DomainError("a d-simplex needs d+1 vertices")
    vol = simplex_volume(verts)
    if vol == 0:
        raise DomainError("simplex is degenerate")
    total = sum(t for _, t in simplex_residue_terms(verts, form, M, pick))
    return factorial(d) * vol * Fraction(factorial(M), factorial(M + d)) * total


# cones -----------------------------------------------------------------------

def cone_term(apex, rays, form, M, a=None):
    """Value of <l,s>^{M+d} / prod <-l, u_i> (residue at eps=0 when l is not regular)."""
    form = [Fraction(x) for x in form]
    d = len(form)
    ls = dot(form, apex)
    pairings = [-dot(form, u) for u in rays]
    singular = [i for i, c in enumerate(pairings) if c == 0]
    n1 = len(singular)
    if n1 == 0:
        value = ls ** (M + d)
        for c in pairings:
            value /= c
        return value
    if a is None:
        a = find_regular_vector(rays)
    a = [Fraction(x) for x in a]
    if any(dot(a, rays[i]) == 0 for i in singular):
        raise DomainError("perturbation vector is not regular for this cone")
    # (ls + eps <a,s>)^{M+d} up to eps^n1
    as_ = dot(a, apex)
    head = [comb(M + d, j) * ls ** (M + d - j) * as_ ** j if j <= M + d else Fraction(0)
            for j in range(n1 + 1)]
    factors = [inverse_linear_series(pairings[i], -dot(a, rays[i]), n1)
               for i in range(d) if i not in singular]
    value = _series_coeff(head, factors, n1)
    for i in singular:
        value /= -dot(a, rays[i])
    return value


def integrate_plf_cone(apex, rays, form, M, a=None):
    """Contribution of the simplicial cone apex + cone(rays) to the integral of <l,x>^M."""
    d = len(form)
    vol = abs(det(columns_to_matrix(rays)))
    return Fraction(factorial(M), factorial(M + d)) * vol * cone_term(apex, rays, form, M, a)


# decompositions ---------------------------------------------------------------

def decompose(P, method):
    """Pieces of P for the chosen method.

    Triangulation yields vertex tuples; the cone method yields SimplicialCones
    (apex at a vertex) together with one perturbation vector regular for all.
    """
    if method == TRIANGULATION:
        return triangulate_polytope(P), None
    if method == CONE:
        if not P.is_full_dimensional():
            raise DomainError("polytope is not full-dimensional")
        cones = []
        for v in P.vertices():
            cones.extend(triangulate_cone(tangent_cone(P, v), apex=v))
        a = find_regular_vector([u for c in cones for u in c.rays])
        return cones, a
    raise ValueError(f"unknown method {method!r}")


def _piece_value(piece, a, forms):
    total = Fraction(0)
    if not hasattr(piece, "rays"):
        for c, form, M in forms:
            total += c * integrate_plf_simplex(piece, form, M)
    else:
        for c, form, M in forms:
            total += c * integrate_plf_cone(piece.apex, piece.rays, form, M, a)
    return total


def _piece_value_star(args):
    return _piece_value(*args)


def _sum_over_pieces(pieces, a, forms, jobs=1):
    tasks = [(p, a, forms) for p in pieces]
    if jobs and jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            values = list(ex.map(_piece_value_star, tasks))
    else:
        values = [_piece_value(*t) for t in tasks]
    total = Fraction(0)
    for v in values:
        total += v
    return total


def integrate_plf_polytope(P, form, M, method=TRIANGULATION, jobs=1):
    pieces, a = decompose(P, method)
    forms = [(Fraction(1), tuple(Fraction(x) for x in form), M)]
    value = _sum_over_pieces(pieces, a, forms, jobs)
    return IntegrationResult(value, method, len(pieces))


def integrate_polynomial(P, f, method=TRIANGULATION, jobs=1):
    lfs = to_linear_forms(f)
    pieces, a = decompose(P, method)
    forms = list(lfs)
    if not forms:
        return Fraction(0)
    return _sum_over_pieces(pieces, a, forms, jobs)


def cone_vertex_terms(P, form, M, a=None):
    """Per-vertex sums of cone contributions (for inspecting Brion-type sums)."""
    out = {}
    cones = []
    for v in P.vertices():
        cones.extend(triangulate_cone(tangent_cone(P, v), apex=v))
    if a is None:
        a = find_regular_vector([u for c in cones for u in c.rays])
    for c in cones:
        out[c.apex] = out.get(c.apex, Fraction(0)) + integrate_plf_cone(c.apex, c.rays, form, M, a)
    return out


def integrate_monomial_box(lower, upper, m):
    """Closed form of the integral of x^m over an axis-aligned box."""
    value = Fraction(1)
    for lo, hi, e in zip(lower, upper, m):
        lo, hi = Fraction(lo), Fraction(hi)
        value *= (hi ** (e + 1) - lo ** (e + 1)) / (e + 1)
    return value


def integrate_polynomial_box(lower, upper, f):
    return sum((c * integrate_monomial_box(lower, upper, m) for m, c in f.terms()), Fraction(0))


# products of affine functions ------------------------------------------------------

def _all_exponents(n, M):
    if n == 0:
        yield ()
        return
    for first in range(M + 1):
        for rest in _all_exponents(n - 1, M - first):
            yield (first,) + rest


def _table(series, n, M):
    return {p: series.coefficient(p) for p in _all_exponents(n, M)}


def integrate_affine_products_simplex(verts, factors, M):
    """Table p -> integral over the simplex of prod (<l_i,x> + r_i)^{p_i} / p_i!, |p| <= M."""
    verts = [tuple(Fraction(x) for x in v) for v in verts]
    n = len(factors)
    d = len(verts[0])
    vol = simplex_volume(verts)
    if vol == 0:
        raise DomainError("simplex is degenerate")
    tmpl = TruncatedSeries(n, M)
    H = tmpl.constant(1)
    for s in verts:
        L = tmpl.linear([dot(l, s) for l, _ in factors])
        H = H * L.compose([1] * (M + 1))
    S = tmpl.like({e: c / factorial(sum(e) + d) for e, c in H.terms.items()})
    G = exp_series([r for _, r in factors], M) * S
    G = G.scale(factorial(d) * vol)
    return _table(G, n, M)


def integrate_affine_products_cone(P, factors, M):
    """Same table as the simplex version, assembled from vertex cones."""
    n = len(factors)
    d = P.dim
    cones = []
    for v in P.vertices():
        cones.extend(triangulate_cone(tangent_cone(P, v), apex=v))
    aux = find_regular_vector([u for c in cones for u in c.rays], dim=d)
    tmpl = TruncatedSeries(n, M, laurent=True)
    total = tmpl.like()
    for cone in cones:
        s, rays = cone.apex, cone.rays
        prod = tmpl.constant(1)
        for u in rays:
            b = tmpl.linear([dot(l, u) for l, _ in factors])
            beta = dot(aux, u)
            factor = tmpl.like()
            bk = tmpl.constant(1)
            for k in range(M + 1):
                if k:
                    bk = bk * b
                shift = tmpl.monomial((0,) * n + (-1 - k,), (-1) ** (k + 1) * beta ** (-1 - k))
                factor = factor + bk * shift
            prod = prod * factor
        low = -prod.min_laurent_exponent()
        sa = dot(aux, s)
        ex = tmpl.like({(0,) * n + (j,): sa ** j / factorial(j) for j in range(low + 1)})
        body = residue_coeff(prod * ex, 0)
        body = body * exp_series([dot(l, s) + r for l, r in factors], M)
        vol = abs(det(columns_to_matrix(rays)))
        total = total + _lift(body, tmpl).scale(vol)
    return _table(residue_coeff(total, 0), n, M)


def _lift(series, tmpl):
    return tmpl.like({e + (0,): c for e, c in series.terms.items()})
