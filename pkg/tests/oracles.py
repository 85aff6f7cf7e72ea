"""Independent brute-force references used by the tests."""

import itertools
from fractions import Fraction as F
from math import factorial


def _det(M):
    M = [[F(x) for x in row] for row in M]
    n = len(M)
    sign = 1
    for c in range(n):
        p = next((r for r in range(c, n) if M[r][c]), None)
        if p is None:
            return F(0)
        if p != c:
            M[c], M[p] = M[p], M[c]
            sign = -sign
        for r in range(c + 1, n):
            q = M[r][c] / M[c][c]
            M[r] = [a - q * b for a, b in zip(M[r], M[c])]
    out = F(sign)
    for i in range(n):
        out *= M[i][i]
    return out


def monomial_over_simplex(verts, m):
    """Integral of x^m over a simplex via barycentric expansion and Dirichlet moments."""
    d = len(m)
    verts = [[F(x) for x in v] for v in verts]
    vol = abs(_det([[a - b for a, b in zip(v, verts[0])] for v in verts[1:]])) / factorial(d)
    poly = {(0,) * (d + 1): F(1)}
    for i, e in enumerate(m):
        for _ in range(e):
            nxt = {}
            for beta, c in poly.items():
                for j in range(d + 1):
                    if verts[j][i]:
                        b = list(beta)
                        b[j] += 1
                        b = tuple(b)
                        nxt[b] = nxt.get(b, 0) + c * verts[j][i]
            poly = nxt
    total = F(0)
    for beta, c in poly.items():
        w = F(1)
        for b in beta:
            w *= factorial(b)
        total += c * w / factorial(sum(beta) + d)
    return factorial(d) * vol * total


def kuhn_simplices(lower, upper):
    d = len(lower)
    for perm in itertools.permutations(range(d)):
        v = [F(x) for x in lower]
        verts = [tuple(v)]
        for i in perm:
            v[i] = F(upper[i])
            verts.append(tuple(v))
        yield verts


def polynomial_over_box(lower, upper, f):
    total = F(0)
    simplices = list(kuhn_simplices(lower, upper))
    for m, c in f.terms():
        total += c * sum(monomial_over_simplex(s, m) for s in simplices)
    return total


def interpolation_residual_degree_ok(values, degree):
    """True when values at consecutive equally spaced points fit a polynomial of this degree."""
    diffs = list(values)
    for _ in range(degree + 1):
        diffs = [b - a for a, b in zip(diffs, diffs[1:])]
    return not any(diffs)
