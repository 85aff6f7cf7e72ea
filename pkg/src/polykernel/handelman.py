"""Handelman decompositions over polytopes through an exact rational LP.

A polytope with facets g_i(x) = b_i - a_i.x >= 0 certifies positivity of f
when f + s = sum c_alpha g^alpha with c_alpha >= 0.  The LP below finds such
a representation of a fixed degree t; the simplex solver is exact and uses
Bland's rule so it always terminates and returns the same basis.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

from .exact_arith import as_rational
from .integrate import integrate_affine_products_simplex
from .polyhedra import DomainError, triangulate_polytope
from .polynomial import SparsePolynomial, affine_power_product

INFEASIBLE = "infeasible"
OPTIMAL = "optimal"
UNBOUNDED = "unbounded"

DEFAULT_ESCALATION = 4


# exact simplex ------------------------------------------------------------------

@dataclass
class ExactLp:
    """min c.x subject to A x = b, with x_j >= 0 unless free[j]."""
    A: list
    b: list
    c: list
    free: list
    labels: list = field(default_factory=list)

    def __post_init__(self):
        n = len(self.c)
        if len(self.free) != n or any(len(row) != n for row in self.A):
            raise ValueError("LP dimensions are inconsistent")
        if len(self.A) != len(self.b):
            raise ValueError("LP has a different number of rows and right-hand sides")

    @property
    def shape(self):
        return len(self.A), len(self.c)


@dataclass(frozen=True)
class LpResult:
    status: str
    x: tuple = ()
    objective: Fraction = None
    # Farkas vector y with y.A <= 0 on every sign-constrained column, y.A = 0 on
    # free columns and y.b > 0; present only when status is infeasible.
    certificate: tuple = ()
    pivots: int = 0


class _Tableau:
    def __init__(self, rows, rhs, basis):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis
        self.pivots = 0

    def pivot(self, r, j):
        row = self.rows[r]
        p = row[j]
        if p != 1:
            self.rows[r] = row = [v / p for v in row]
            self.rhs[r] /= p
        for i, other in enumerate(self.rows):
            if i != r and other[j]:
                f = other[j]
                self.rows[i] = [a - f * b for a, b in zip(other, row)]
                self.rhs[i] -= f * self.rhs[r]
        self.basis[r] = j
        self.pivots += 1

    def reduced_costs(self, cost, allowed):
        n = len(cost)
        red = list(cost)
        for r, bj in enumerate(self.basis):
            cb = cost[bj]
            if cb:
                row = self.rows[r]
                for j in range(n):
                    if row[j]:
                        red[j] -= cb * row[j]
        return [red[j] if allowed[j] else Fraction(0) for j in range(n)]

    def run(self, cost, allowed):
        """Bland's rule: lowest-index entering column, lowest-index leaving variable."""
        while True:
            red = self.reduced_costs(cost, allowed)
            entering = next((j for j, v in enumerate(red) if v < 0), None)
            if entering is None:
                return OPTIMAL
            best = None
            for r, row in enumerate(self.rows):
                if row[entering] > 0:
                    ratio = self.rhs[r] / row[entering]
                    key = (ratio, self.basis[r])
                    if best is None or key < best[0]:
                        best = (key, r)
            if best is None:
                return UNBOUNDED
            self.pivot(best[1], entering)


def solve_lp_exact(lp):
    """Two-phase simplex over the rationals."""
    m, n = lp.shape
    # split free variables into a difference of two nonnegative ones
    colmap = []
    for j in range(n):
        colmap.append((j, 1))
        if lp.free[j]:
            colmap.append((j, -1))
    N = len(colmap)
    signs = [-1 if as_rational(bi) < 0 else 1 for bi in lp.b]
    rows, rhs = [], []
    for i in range(m):
        row = [signs[i] * sg * as_rational(lp.A[i][j]) for j, sg in colmap]
        row += [Fraction(1) if k == i else Fraction(0) for k in range(m)]
        rows.append(row)
        rhs.append(signs[i] * as_rational(lp.b[i]))
    tab = _Tableau(rows, rhs, [N + i for i in range(m)])
    allowed = [True] * (N + m)

    phase1 = [Fraction(0)] * N + [Fraction(1)] * m
    tab.run(phase1, allowed)
    infeas = sum((tab.rhs[r] for r, bj in enumerate(tab.basis) if bj >= N), Fraction(0))
    if infeas > 0:
        red = tab.reduced_costs(phase1, allowed)
        y = tuple(signs[i] * (1 - red[N + i]) for i in range(m))
        return LpResult(INFEASIBLE, certificate=y, pivots=tab.pivots)

    # drive artificial variables out of the basis; drop redundant rows
    r = 0
    while r < len(tab.rows):
        if tab.basis[r] >= N:
            j = next((j for j in range(N) if tab.rows[r][j]), None)
            if j is None:
                del tab.rows[r], tab.rhs[r], tab.basis[r]
                continue
            tab.pivot(r, j)
        r += 1
    allowed = [True] * N + [False] * m

    cost = [sg * as_rational(lp.c[j]) for j, sg in colmap] + [Fraction(0)] * m
    if tab.run(cost, allowed) == UNBOUNDED:
        return LpResult(UNBOUNDED, pivots=tab.pivots)
    xs = [Fraction(0)] * (N + m)
    for r, bj in enumerate(tab.basis):
        xs[bj] = tab.rhs[r]
    x = [Fraction(0)] * n
    for k, (j, sg) in enumerate(colmap):
        x[j] += sg * xs[k]
    obj = sum((as_rational(cj) * xj for cj, xj in zip(lp.c, x)), Fraction(0))
    return LpResult(OPTIMAL, tuple(x), obj, pivots=tab.pivots)


# Handelman LP ---------------------------------------------------------------------

def _compositions(n, total):
    if n == 0:
        if total == 0:
            yield ()
        return
    for a in range(total, -1, -1):
        for rest in _compositions(n - 1, total - a):
            yield (a,) + rest


def exponents_upto(n, t):
    """All alpha in Z^n_{>=0} with |alpha| <= t, graded then lexicographically descending."""
    return [e for total in range(t + 1) for e in _compositions(n, total)]


def facets(P):
    """(b_i, a_i) pairs for the facet forms g_i = b_i - a_i.x."""
    return [(bi, [-a for a in row]) for row, bi in zip(P.A, P.b)]


@dataclass(frozen=True)
class HandelmanDecomposition:
    degree: int
    terms: dict
    shift: Fraction
    facets: tuple
    objective: Fraction = None

    def expand(self):
        dim = len(self.facets[0][1])
        out = SparsePolynomial(dim)
        for alpha, c in self.terms.items():
            out = out + affine_power_product(self.facets, alpha, dim).scale(c)
        return out

    def is_valid_for(self, f):
        shifted = f + SparsePolynomial.constant(f.dim, self.shift)
        return all(c >= 0 for c in self.terms.values()) and self.expand() == shifted


def build_lp(f, P, t, shift=None, objective="sparse"):
    """LP whose feasible points are degree-t decompositions of f + s.

    Columns are c_alpha for every |alpha| <= t (alpha = 0 included) and, unless
    ``shift`` fixes it, a final free column s.  ``objective`` is "sparse"
    (s + sum c) or "shift" (s alone).
    """
    if t < f.degree():
        raise ValueError("Handelman degree must be at least deg f")
    gs = facets(P)
    dim = P.dim
    alphas = exponents_upto(len(gs), t)
    monos = exponents_upto(dim, t)
    index = {m: i for i, m in enumerate(monos)}
    A = [[Fraction(0)] * len(alphas) for _ in monos]
    for j, alpha in enumerate(alphas):
        for m, c in affine_power_product(gs, alpha, dim).terms():
            A[index[m]][j] = c
    b = [f.coefficient(m) for m in monos]
    labels = list(alphas)
    free = [False] * len(alphas)
    zero = (0,) * dim
    if shift is None:
        for i, m in enumerate(monos):
            A[i].append(Fraction(-1) if m == zero else Fraction(0))
        labels.append("s")
        free.append(True)
        c = [Fraction(1 if objective == "sparse" else 0)] * len(alphas) + [Fraction(1)]
    else:
        b[index[zero]] += as_rational(shift)
        c = [Fraction(1)] * len(alphas)
    return ExactLp(A, b, c, free, labels)


def handelman_decompose(f, P, t, shift=None, objective="sparse"):
    """Degree-t decomposition of f + s, or None when the LP is infeasible."""
    lp = build_lp(f, P, t, shift, objective)
    res = solve_lp_exact(lp)
    if res.status == INFEASIBLE:
        return None
    if res.status == UNBOUNDED:
        raise DomainError("Handelman LP is unbounded; is the polytope bounded?")
    nalpha = len(lp.labels) - (1 if shift is None else 0)
    terms = {lp.labels[j]: res.x[j] for j in range(nalpha) if res.x[j]}
    s = res.x[-1] if shift is None else as_rational(shift)
    return HandelmanDecomposition(t, terms, s, tuple(facets(P)), res.objective)


def handelman_decompose_escalating(f, P, t=None, cap=None, shift=None):
    t = f.degree() if t is None else t
    cap = t + DEFAULT_ESCALATION if cap is None else cap
    while t <= cap:
        dec = handelman_decompose(f, P, t, shift)
        if dec is not None:
            return dec
        t += 1
    raise DomainError(f"no Handelman decomposition up to degree {cap}")


def handelman_bound(f, P, t):
    """Smallest lambda with lambda - f in the degree-t Handelman cone (inf if none)."""
    dec = handelman_decompose(-f, P, t, objective="shift")
    if dec is None:
        return math.inf
    return dec.shift


def min_epsilon(f, P, t):
    """Smallest eps such that f + eps has a degree-t decomposition (exact LP)."""
    dec = handelman_decompose(f, P, t, objective="shift")
    return math.inf if dec is None else dec.shift


def has_decomposition(f, P, t, eps=0):
    return handelman_decompose(f, P, t, shift=eps) is not None


def epsilon_frontier(f, P, t, lo=Fraction(0), hi=Fraction(2), tol=Fraction(1, 1000)):
    """Bisect on eps for feasibility of a degree-t decomposition of f + eps.

    Returns an interval (lo, hi] of width <= tol containing the frontier,
    assuming infeasibility at lo and feasibility at hi.
    """
    lo, hi = Fraction(lo), Fraction(hi)
    if not has_decomposition(f, P, t, hi):
        raise DomainError("upper end of the bisection interval is infeasible")
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if has_decomposition(f, P, t, mid):
            hi = mid
        else:
            lo = mid
    return lo, hi


# integration through Handelman terms -------------------------------------------------

def _power_terms(terms, k):
    """(sum c_alpha y^alpha)^k as a dict over summed exponent vectors."""
    n = len(next(iter(terms))) if terms else 0
    out = {(0,) * n: Fraction(1)}
    for _ in range(k):
        nxt = {}
        for e1, c1 in out.items():
            for e2, c2 in terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                nxt[e] = nxt.get(e, 0) + c1 * c2
        out = {e: c for e, c in nxt.items() if c}
    return out


def integrate_handelman_terms(dec, P, k):
    """Integral over P of (sum c_alpha g^alpha)^k using one affine-products table per simplex."""
    powered = _power_terms(dec.terms, k)
    if not powered:
        return Fraction(0)
    factors = [([as_rational(x) for x in a], as_rational(b)) for b, a in dec.facets]
    M = max(sum(e) for e in powered)
    total = Fraction(0)
    for simplex in triangulate_polytope(P):
        table = integrate_affine_products_simplex(simplex, factors, M)
        for beta, c in powered.items():
            weight = 1
            for bi in beta:
                weight *= factorial(bi)
            total += c * weight * table[beta]
    return total


def integrate_via_handelman(f, P, k, t=None):
    """Return (s, integral over P of (f + s)^k) with s from the Handelman LP."""
    dec = handelman_decompose_escalating(f, P, t)
    return dec.shift, integrate_handelman_terms(dec, P, k)
