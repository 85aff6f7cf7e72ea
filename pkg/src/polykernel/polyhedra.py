"""Rational polytopes and cones at desk scale.

Everything is exact: vertex and facet enumeration by subset search, a pulling
triangulation, Hermite normal form, LLL over the rationals and the signed
unimodular (Barvinok) decomposition performed on the dual side.
"""

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial, gcd, lcm

from .exact_arith import as_rational


class DomainError(ValueError):
    """Raised for geometrically invalid input (unbounded, empty, degenerate)."""


# exact linear algebra ---------------------------------------------------------

def dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def mat_vec(M, v):
    return [dot(row, v) for row in M]


def transpose(M):
    return [list(col) for col in zip(*M)]


def columns_to_matrix(cols):
    """Square matrix whose columns are the given vectors."""
    return transpose([list(c) for c in cols])


def _frac_matrix(M):
    return [[Fraction(x) for x in row] for row in M]


def row_reduce(M):
    """Reduced row echelon form; returns (R, pivot_columns)."""
    R = _frac_matrix(M)
    rows = len(R)
    cols = len(R[0]) if R else 0
    pivots = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if R[i][c] != 0), None)
        if p is None:
            continue
        R[r], R[p] = R[p], R[r]
        inv = 1 / R[r][c]
        R[r] = [x * inv for x in R[r]]
        for i in range(rows):
            if i != r and R[i][c] != 0:
                f = R[i][c]
                R[i] = [a - f * b for a, b in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return R, pivots


def rank(M):
    if not M:
        return 0
    return len(row_reduce(M)[1])


def nullspace(M, ncols=None):
    """Basis of {x : M x = 0} as a list of Fraction vectors."""
    if not M:
        n = ncols
        return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    n = len(M[0])
    R, pivots = row_reduce(M)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * n
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -R[r][fc]
        basis.append(v)
    return basis


def det(M):
    n = len(M)
    A = _frac_matrix(M)
    result = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if A[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            A[c], A[p] = A[p], A[c]
            result = -result
        result *= A[c][c]
        for i in range(c + 1, n):
            if A[i][c] != 0:
                f = A[i][c] / A[c][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[c])]
    return result


def inverse(M):
    n = len(M)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    R, pivots = row_reduce(aug)
    if pivots[:n] != list(range(n)):
        raise DomainError("matrix is singular")
    return [row[n:] for row in R]


def solve(M, b):
    Minv = inverse(M)
    return mat_vec(Minv, b)


def primitive(v):
    """Scale a nonzero rational vector to the primitive integer vector on its ray."""
    v = [Fraction(x) for x in v]
    den = 1
    for x in v:
        den = lcm(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        raise DomainError("zero vector has no primitive representative")
    return tuple(x // g for x in ints)


# data types ---------------------------------------------------------------

@dataclass(frozen=True)
class SimplicialCone:
    apex: tuple
    rays: tuple
    sign: int = 1

    def __post_init__(self):
        d = len(self.apex)
        if len(self.rays) != d or any(len(r) != d for r in self.rays):
            raise DomainError("a simplicial cone needs d rays in R^d")
        if det(columns_to_matrix(self.rays)) == 0:
            raise DomainError("cone rays are linearly dependent")

    @property
    def dim(self):
        return len(self.apex)

    @property
    def det(self):
        return abs(det(columns_to_matrix(self.rays)))

    def is_unimodular(self):
        return self.det == 1


@dataclass(frozen=True)
class LatticeBasis:
    """Lattice B Z^r generated by the columns of B."""
    columns: tuple

    def __post_init__(self):
        if det(columns_to_matrix(self.columns)) == 0:
            raise DomainError("lattice basis is singular")

    @property
    def matrix(self):
        return columns_to_matrix(self.columns)

    @property
    def index(self):
        return abs(det(self.matrix))


@dataclass
class Polytope:
    """P = {x : A x <= b}; the rows encode the facets b_i - a_i.x >= 0."""
    A: list
    b: list
    _vertices: list = field(default=None, repr=False)

    def __post_init__(self):
        self.A = [[as_rational(x) for x in row] for row in self.A]
        self.b = [as_rational(x) for x in self.b]
        if len(self.A) != len(self.b):
            raise DomainError("constraint matrix and right-hand side disagree")

    @property
    def dim(self):
        return len(self.A[0])

    @classmethod
    def box(cls, lower, upper):
        d = len(lower)
        A, b = [], []
        for i in range(d):
            e = [0] * d
            e[i] = 1
            A.append(list(e))
            b.append(upper[i])
            e[i] = -1
            A.append(list(e))
            b.append(-lower[i])
        P = cls(A, b)
        P._vertices = [tuple(Fraction(c) for c in v)
                       for v in itertools.product(*zip(lower, upper))]
        return P

    @classmethod
    def from_points(cls, points):
        """Convex hull of a full-dimensional point set."""
        pts = [tuple(Fraction(x) for x in p) for p in points]
        pts = sorted(set(pts))
        d = len(pts[0])
        if rank([[a - b for a, b in zip(p, pts[0])] for p in pts[1:]] or [[0] * d]) < d:
            raise DomainError("points do not span a full-dimensional polytope")
        facets = _facets_full(pts)
        A = [list(a) for a, _, _ in facets]
        b = [c for _, c, _ in facets]
        P = cls(A, b)
        verts = []
        for i, p in enumerate(pts):
            tight = [A[j] for j, (_, _, members) in enumerate(facets) if i in members]
            if rank(tight) == d:
                verts.append(p)
        P._vertices = verts
        return P

    def vertices(self):
        if self._vertices is None:
            self._vertices = vertices_from_hrep(self)
        return self._vertices

    def contains(self, x):
        return all(dot(a, x) <= bi for a, bi in zip(self.A, self.b))

    def tight_rows(self, x):
        return [i for i, (a, bi) in enumerate(zip(self.A, self.b)) if dot(a, x) == bi]

    def is_full_dimensional(self):
        V = self.vertices()
        if len(V) <= self.dim:
            return False
        return rank([[a - b for a, b in zip(v, V[0])] for v in V[1:]]) == self.dim

    def box_bounds(self):
        """(lower, upper) if P is an axis-aligned box, else None."""
        d = self.dim
        lower = [None] * d
        upper = [None] * d
        for a, bi in zip(self.A, self.b):
            nz = [i for i, x in enumerate(a) if x != 0]
            if len(nz) != 1:
                return None
            i = nz[0]
            v = bi / a[i]
            if a[i] > 0:
                upper[i] = v if upper[i] is None else min(upper[i], v)
            else:
                lower[i] = v if lower[i] is None else max(lower[i], v)
        if any(x is None for x in lower + upper) or any(l > u for l, u in zip(lower, upper)):
            return None
        return lower, upper

    def volume(self):
        return sum(simplex_volume(s) for s in triangulate_polytope(self))


def vertices_from_hrep(P):
    """All vertices by exhaustive search over d-subsets of tight rows."""
    d = P.dim
    m = len(P.A)
    if m < d + 1:
        raise DomainError("too few inequalities for a bounded polytope")
    found = set()
    for rows in itertools.combinations(range(m), d):
        M = [P.A[i] for i in rows]
        if det(M) == 0:
            continue
        x = tuple(solve(M, [P.b[i] for i in rows]))
        if P.contains(x):
            found.add(x)
    if not found:
        raise DomainError("polytope is empty")
    # boundedness: the recession cone {A y <= 0} must be trivial
    if _has_recession_direction(P.A):
        raise DomainError("polyhedron is unbounded")
    return sorted(found)


def _has_recession_direction(A):
    d = len(A[0])
    if rank(A) < d:
        return True
    for rows in itertools.combinations(range(len(A)), d - 1):
        ns = nullspace([A[i] for i in rows], d)
        if len(ns) != 1:
            continue
        u = ns[0]
        for s in (1, -1):
            if all(dot(a, u) * s <= 0 for a in A):
                return True
    return False


def parse_hrep(text):
    """Parse the "m d+1" header followed by rows "b -a_1 ... -a_d"."""
    lines = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise ValueError("empty H-representation")
    try:
        m, width = int(lines[0][0]), int(lines[0][1])
    except (ValueError, IndexError):
        raise ValueError("first line must be 'm d+1'") from None
    rows = lines[1:1 + m]
    if len(rows) != m:
        raise ValueError(f"expected {m} inequality rows, found {len(rows)}")
    A, b = [], []
    for r in rows:
        if len(r) != width:
            raise ValueError(f"row {' '.join(r)} does not have {width} entries")
        try:
            vals = [Fraction(x) for x in r]
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"non-numeric entry in row {' '.join(r)}") from None
        den = 1
        for v in vals:
            den = lcm(den, v.denominator)
        vals = [v * den for v in vals]
        b.append(vals[0])
        A.append([-v for v in vals[1:]])
    return Polytope(A, b)


def format_hrep(P):
    lines = [f"{len(P.A)} {P.dim + 1}"]
    for a, bi in zip(P.A, P.b):
        den = lcm(bi.denominator, *(x.denominator for x in a))
        lines.append(" ".join(str(int(v * den)) for v in [bi] + [-x for x in a]))
    return "\n".join(lines) + "\n"


# facets and triangulations ------------------------------------------------------

def _facets_full(pts):
    """Facets of conv(pts) in R^d as (normal, offset, member indices) with normal.x <= offset."""
    d = len(pts[0])
    seen = {}
    for sub in itertools.combinations(range(len(pts)), d):
        base = pts[sub[0]]
        diffs = [[a - b for a, b in zip(pts[j], base)] for j in sub[1:]]
        ns = nullspace(diffs, d) if diffs else nullspace([], d)
        if len(ns) != 1:
            continue
        n = primitive(ns[0])
        c = dot(n, base)
        vals = [dot(n, p) for p in pts]
        if all(v <= c for v in vals):
            pass
        elif all(v >= c for v in vals):
            n = tuple(-x for x in n)
            c = -c
        else:
            continue
        members = frozenset(i for i, p in enumerate(pts) if dot(n, p) == c)
        if members not in seen:
            seen[members] = (n, c, members)
    return list(seen.values())


def _affine_chart(pts):
    """Project points onto coordinates that are injective on their affine hull."""
    base = pts[0]
    diffs = [[a - b for a, b in zip(p, base)] for p in pts[1:]]
    if not diffs:
        return [()], 0
    _, cols = row_reduce(diffs)
    return [tuple(p[c] for c in cols) for p in pts], len(cols)


def _pull(points, idx):
    # idx is sorted; the smallest index is pulled first at every level, so the
    # triangulations induced on shared faces agree
    chart, k = _affine_chart([points[i] for i in idx])
    if len(idx) == k + 1:
        return [tuple(idx)]
    out = []
    for _, _, members in _facets_full(chart):
        if 0 in members:
            continue
        face = [idx[j] for j in sorted(members)]
        for s in _pull(points, face):
            out.append((idx[0],) + s)
    return out


def triangulate_points(points):
    """Pulling triangulation of a point configuration (indices into points)."""
    pts = [tuple(Fraction(x) for x in p) for p in points]
    order = sorted(range(len(pts)), key=lambda i: pts[i])
    ordered = [pts[i] for i in order]
    simplices = _pull(ordered, list(range(len(ordered))))
    return [tuple(sorted(order[i] for i in s)) for s in simplices]


def simplex_volume(verts):
    d = len(verts[0])
    M = [[a - b for a, b in zip(v, verts[0])] for v in verts[1:]]
    return abs(det(M)) / factorial(d)


def triangulate_polytope(P):
    V = P.vertices()
    if not P.is_full_dimensional():
        raise DomainError("polytope is not full-dimensional")
    return [tuple(V[i] for i in s) for s in triangulate_points(V)]


def tangent_cone(P, v):
    """Primitive edge directions of P at the vertex v."""
    v = tuple(Fraction(x) for x in v)
    V = P.vertices()
    if v not in V:
        raise DomainError(f"{v} is not a vertex")
    d = P.dim
    tv = set(P.tight_rows(v))
    rays = []
    for w in V:
        if w == v:
            continue
        common = [P.A[i] for i in tv.intersection(P.tight_rows(w))]
        if (rank(common) if common else 0) == d - 1:
            rays.append(primitive([a - b for a, b in zip(w, v)]))
    return sorted(set(rays))


def _interior_functional(rays):
    d = len(rays[0])
    gens = polar(rays)
    c = [-sum(Fraction(g[i]) for g in gens) for i in range(d)]
    if not all(dot(c, r) > 0 for r in rays):
        raise DomainError("cone is not pointed")
    return c


def triangulate_cone(rays, apex=None):
    """Simplicial cones (primitive rays) covering a pointed full-dimensional cone."""
    rays = [primitive(r) for r in rays]
    d = len(rays[0])
    if apex is None:
        apex = (Fraction(0),) * d
    if rank(rays) < d:
        raise DomainError("cone is not full-dimensional")
    if len(rays) == d:
        return [SimplicialCone(tuple(apex), tuple(rays))]
    c = _interior_functional(rays)
    slice_pts = [tuple(Fraction(x) / dot(c, r) for x in r) for r in rays]
    out = []
    for s in triangulate_points(slice_pts):
        out.append(SimplicialCone(tuple(apex), tuple(rays[i] for i in s)))
    return out


def polar(rays, d=None):
    """Generators of {y : <u, y> <= 0 for every generator u}."""
    rays = [list(r) for r in rays]
    if d is None:
        d = len(rays[0])
    if not rays:
        gens = []
        for i in range(d):
            e = [0] * d
            e[i] = 1
            gens.append(tuple(e))
            e[i] = -1
            gens.append(tuple(e))
        return gens
    lineal = nullspace(rays, d)
    gens = []
    for v in lineal:
        p = primitive(v)
        gens.append(p)
        gens.append(tuple(-x for x in p))
    need = d - len(lineal) - 1
    found = set()
    if need >= 0:
        for sub in itertools.combinations(range(len(rays)), need):
            M = [rays[i] for i in sub] + [list(v) for v in lineal]
            ns = nullspace(M, d) if M else nullspace([], d)
            if len(ns) != 1:
                continue
            u = ns[0]
            for s in (1, -1):
                cand = [s * x for x in u]
                if all(dot(r, cand) <= 0 for r in rays):
                    found.add(primitive(cand))
    gens.extend(sorted(found))
    return gens


# lattices -----------------------------------------------------------------------

def hnf(A):
    """Row-style Hermite normal form: returns (H, U) with U A = H, U unimodular."""
    H = [[int(x) for x in row] for row in A]
    m = len(H)
    n = len(H[0]) if m else 0
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    r = 0
    for c in range(n):
        if r == m:
            break
        while True:
            nz = [i for i in range(r, m) if H[i][c] != 0]
            if not nz:
                break
            p = min(nz, key=lambda i: (abs(H[i][c]), i))
            H[r], H[p] = H[p], H[r]
            U[r], U[p] = U[p], U[r]
            done = True
            for i in range(r + 1, m):
                if H[i][c]:
                    q = H[i][c] // H[r][c]
                    H[i] = [a - q * b for a, b in zip(H[i], H[r])]
                    U[i] = [a - q * b for a, b in zip(U[i], U[r])]
                    if H[i][c]:
                        done = False
            if done:
                break
        if r < m and H[r][c] != 0:
            if H[r][c] < 0:
                H[r] = [-a for a in H[r]]
                U[r] = [-a for a in U[r]]
            for i in range(r):
                q = H[i][c] // H[r][c]
                if q:
                    H[i] = [a - q * b for a, b in zip(H[i], H[r])]
                    U[i] = [a - q * b for a, b in zip(U[i], U[r])]
            r += 1
    return H, U


def _gram_schmidt(B):
    Bs = []
    mu = [[Fraction(0)] * len(B) for _ in B]
    norms = []
    for i, b in enumerate(B):
        v = [Fraction(x) for x in b]
        for j in range(i):
            mu[i][j] = dot(b, Bs[j]) / norms[j] if norms[j] else Fraction(0)
            v = [a - mu[i][j] * c for a, c in zip(v, Bs[j])]
        Bs.append(v)
        norms.append(dot(v, v))
    return Bs, mu, norms


def lll_reduce(vectors, delta=Fraction(3, 4)):
    """LLL reduction over exact rationals; vectors are the basis rows."""
    B = [[Fraction(x) for x in v] for v in vectors]
    n = len(B)
    if n == 0:
        return B
    if rank(B) < n:
        raise DomainError("LLL needs linearly independent vectors")
    Bs, mu, norms = _gram_schmidt(B)
    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                B[k] = [a - q * b for a, b in zip(B[k], B[j])]
                Bs, mu, norms = _gram_schmidt(B)
        if norms[k] >= (delta - mu[k][k - 1] ** 2) * norms[k - 1]:
            k += 1
        else:
            B[k], B[k - 1] = B[k - 1], B[k]
            Bs, mu, norms = _gram_schmidt(B)
            k = max(k - 1, 1)
    return B


def lll_short_vector(basis):
    """Short nonzero vector of the lattice spanned by the columns of ``basis``."""
    cols = basis.columns if isinstance(basis, LatticeBasis) else basis
    red = lll_reduce([list(c) for c in cols])
    best = min(red, key=lambda v: (dot(v, v), [abs(x) for x in v]))
    return tuple(int(x) if Fraction(x).denominator == 1 else x for x in best)


def find_regular_vector(rays, forbidden_forms=(), dim=None):
    """Deterministic vector a with <a, u> != 0 for every ray and forbidden form.

    Tries (1,...,1), then the moment vectors (1, M, M^2, ...) for M = 2, 3, ...
    """
    vecs = [list(r) for r in rays] + [list(f) for f in forbidden_forms]
    d = dim if dim is not None else (len(vecs[0]) if vecs else None)
    if d is None:
        raise ValueError("dimension is unknown for an empty ray list")
    vecs = [v for v in vecs if any(v)]
    candidates = itertools.chain([[1] * d], ([M ** i for i in range(d)] for M in itertools.count(2)))
    for a in candidates:
        if all(dot(a, v) != 0 for v in vecs):
            return tuple(Fraction(x) for x in a)


def _closest_cosets(U):
    """All nonzero alpha in U^{-1} Z^d reduced to (-1/2, 1/2]^d, one per coset."""
    d = len(U)
    H, _ = hnf(transpose(U))
    Uinv = inverse(U)
    diag = [H[i][i] for i in range(d)]
    for z in itertools.product(*(range(h) for h in diag)):
        if not any(z):
            continue
        lam = mat_vec(Uinv, list(z))
        alpha = [x - round(x) for x in lam]
        if any(alpha):
            yield alpha


def _short_alpha(U):
    """Nonzero alpha with U alpha integral and max |alpha_i| < 1, via LLL."""
    Uinv = inverse(U)
    d = len(U)
    red = lll_reduce(transpose(Uinv))
    cands = []
    for v in red:
        alpha = [x - round(x) for x in v]
        if any(alpha):
            cands.append(alpha)
    for a, b in itertools.combinations(red, 2):
        for s in (1, -1):
            alpha = [x + s * y for x, y in zip(a, b)]
            alpha = [x - round(x) for x in alpha]
            if any(alpha):
                cands.append(alpha)
    best = min(cands, key=lambda al: (max(abs(x) for x in al), al), default=None)
    if best is None or max(abs(x) for x in best) >= 1:
        best = min(_closest_cosets(U), key=lambda al: (max(abs(x) for x in al), al))
    return best


def signed_unimodular_decomposition(rays, stats=None):
    """Barvinok's signed decomposition of cone(rays) in Z^d into unimodular cones.

    Returns (sign, rays) pairs with sum sign*[K] = [cone] modulo lower-dimensional
    cones.  ``stats`` (a dict) receives the largest index met during recursion.
    """
    out = []
    stack = [(1, [primitive(r) for r in rays])]
    while stack:
        sign, R = stack.pop()
        U = columns_to_matrix(R)
        idx = abs(det(U))
        if stats is not None:
            stats["max_index"] = max(stats.get("max_index", 0), int(idx))
        if idx == 1:
            out.append((sign, tuple(R)))
            continue
        alpha = _short_alpha(U)
        w = primitive(mat_vec(U, alpha))
        # recompute coefficients for the primitive w
        coeffs = solve(U, list(w))
        if all(c <= 0 for c in coeffs):
            # the cones would then cover a whole subspace; -w gives a true splitting
            w = tuple(-x for x in w)
            coeffs = [-c for c in coeffs]
        order = sorted((i for i in range(len(R)) if coeffs[i] != 0),
                       key=lambda i: (-abs(coeffs[i]), i))
        for i in order:
            K = list(R)
            K[i] = w
            s = 1 if coeffs[i] > 0 else -1
            stack.append((sign * s, K))
    return out


def barvinok_decompose(cone, lattice=None, stats=None):
    """Signed unimodular decomposition computed on the dual side.

    With ``lattice`` the cone is decomposed relative to that lattice and the
    returned rays are lattice generators expressed in ambient coordinates.
    Lower-dimensional pieces are discarded (on the dual side), so the identity
    holds modulo cones containing lines.
    """
    rays = [list(r) for r in cone.rays]
    d = len(rays)
    if lattice is not None:
        Bm = lattice.matrix
        Binv = inverse(Bm)
        rays = [mat_vec(Binv, r) for r in rays]
    G = columns_to_matrix([primitive(r) for r in rays])
    dual = transpose(inverse(G))  # rows of G^{-1} as columns of G^{-T}
    dual_rays = [primitive(col) for col in transpose(dual)]
    out = []
    for sign, E in signed_unimodular_decomposition(dual_rays, stats):
        Einv_t = transpose(inverse(columns_to_matrix(E)))
        prim = [tuple(int(x) for x in col) for col in transpose(Einv_t)]
        if lattice is not None:
            prim = [tuple(mat_vec(Bm, list(g))) for g in prim]
        out.append(SimplicialCone(tuple(cone.apex), tuple(prim), cone.sign * sign))
    return out
