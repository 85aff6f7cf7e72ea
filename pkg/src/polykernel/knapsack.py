"""Top coefficients of the denumerant E(a; t) = #{x >= 0 : sum a_i x_i = t}.

E(a; t) is a quasi-polynomial of degree N = len(a) - 1.  Its k+1 highest
coefficients come from the poles of prod 1/(1 - z^a_i) of order > N - k,
which sit at roots of unity of order dividing gcds of large sublists.  Each
such group contributes a residue that is the generating function of a
shifted cone relative to a sublattice; the cone is split into signed
unimodular cones and the residue is read off a truncated Laurent series.
Periodic coefficients come out as step polynomials in {r T}.
"""

import itertools
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial, gcd, lcm

from .exact_arith import (TruncatedSeries, bernoulli_factor_coefficients, format_rational,
                          residue_coeff)
from .polyhedra import (DomainError, SimplicialCone, barvinok_decompose, columns_to_matrix,
                        dot, find_regular_vector, hnf, inverse, mat_vec)

LCM_GUARD = 10 ** 4
FACTOR_CAP = 10 ** 9
ORACLE_CAP = 10 ** 6


def _frac_part(x):
    return x - (x.numerator // x.denominator)


def _check_list(a):
    a = [int(x) for x in a]
    if not a or any(x < 1 for x in a):
        raise DomainError("knapsack coefficients must be positive integers")
    return a


# step polynomials --------------------------------------------------------------

class StepPolynomial:
    """sum_l c_l prod_j {r_lj T}^n_lj with r in [0, 1) and n >= 1."""

    def __init__(self, terms=None):
        self.terms = {}
        for factors, c in (terms or {}).items():
            self.add_term(c, factors)

    @staticmethod
    def _normalize(factors):
        powers = {}
        for r, n in factors:
            if n == 0:
                continue
            r = _frac_part(Fraction(r))
            if r == 0:
                return None  # {integer * T} vanishes
            powers[r] = powers.get(r, 0) + n
        return tuple(sorted(powers.items()))

    def add_term(self, c, factors=()):
        key = self._normalize(factors)
        if key is None or not c:
            return self
        v = self.terms.get(key, 0) + Fraction(c)
        if v:
            self.terms[key] = v
        else:
            self.terms.pop(key, None)
        return self

    @classmethod
    def constant(cls, c):
        return cls().add_term(c)

    def __add__(self, other):
        out = StepPolynomial(self.terms)
        for k, c in other.terms.items():
            out.add_term(c, k)
        return out

    def scale(self, c):
        return StepPolynomial({k: v * c for k, v in self.terms.items()})

    def evaluate(self, T):
        T = Fraction(T)
        total = Fraction(0)
        for factors, c in self.terms.items():
            v = c
            for r, n in factors:
                v *= _frac_part(r * T) ** n
            total += v
        return total

    def degree(self):
        return max((sum(n for _, n in k) for k in self.terms), default=0)

    def period(self):
        p = 1
        for k in self.terms:
            for r, _ in k:
                p = lcm(p, r.denominator)
        return p

    def is_constant(self):
        return all(not k for k in self.terms)

    def equals(self, other):
        """Equality as functions on the integers, checked over one common period."""
        p = lcm(self.period(), other.period())
        return all(self.evaluate(T) == other.evaluate(T) for T in range(p))

    def __repr__(self):
        return f"StepPolynomial({format_step_polynomial(self)!r})"


def format_step_polynomial(sp):
    if not sp.terms:
        return "0"
    parts = []
    for factors, c in sorted(sp.terms.items()):
        text = format_rational(c)
        for r, n in factors:
            text += f"*{{{format_rational(r)}*T}}^{n}"
        parts.append(text)
    return " + ".join(parts)


_FACTOR = re.compile(r"\{\s*(-?\d+(?:/\d+)?)\s*\*\s*T\s*\}\s*\^\s*(\d+)")


def parse_step_polynomial(text):
    sp = StepPolynomial()
    text = text.strip()
    if text == "0":
        return sp
    for chunk in text.split(" + "):
        head, *rest = chunk.strip().split("*{")
        try:
            c = Fraction(head.strip())
        except ValueError:
            raise ValueError(f"bad step-polynomial coefficient {head!r}") from None
        factors = []
        for piece in rest:
            m = _FACTOR.fullmatch("{" + piece.strip())
            if not m:
                raise ValueError(f"bad step-polynomial factor {piece!r}")
            factors.append((Fraction(m.group(1)), int(m.group(2))))
        sp.add_term(c, factors)
    return sp


# gcd poset and Moebius function -------------------------------------------------------

@dataclass(frozen=True)
class GcdPoset:
    values: tuple
    mobius: dict


def mobius_from_values(values):
    """mu(n) = 1 - sum of mu(v) over the other poset values v divisible by n."""
    values = sorted(set(values))
    mu = {}
    for n in reversed(values):
        mu[n] = 1 - sum(mu[v] for v in values if v != n and v % n == 0)
    return mu


def gcd_poset(a, k):
    """gcds of all sublists of size > N - k, with their Moebius weights."""
    a = _check_list(a)
    N = len(a) - 1
    if k < 0 or k > N:
        raise ValueError("k must lie in 0..N")
    vals = set()
    for drop in range(k + 1):
        for removed in itertools.combinations(range(N + 1), drop):
            rs = set(removed)
            g = 0
            for i, x in enumerate(a):
                if i not in rs:
                    g = gcd(g, x)
            vals.add(g)
    mu = mobius_from_values(vals)
    return GcdPoset(tuple(sorted(vals)), mu)


# lattice data for one pole group ---------------------------------------------------

def bezout_and_lattice(a, f):
    """Return (J, s, B) with sum_J s_i a_i = 1 mod f and B a basis of Lambda(a, f).

    Lambda(a, f) = {y in Z^J : <a_J, y> in f Z}; the columns of B generate it and
    |det B| = f.  s is reduced into [0, f).
    """
    a = _check_list(a)
    J = [i for i, x in enumerate(a) if x % f]
    if f <= 1 or not J:
        raise DomainError("f must exceed 1 and leave some coefficient indivisible")
    aJ = [a[i] for i in J]
    H, U = hnf([[x] for x in aJ] + [[f]])
    if H[0][0] != 1:
        raise DomainError("f and the indivisible coefficients are not coprime")
    s = tuple(x % f for x in U[0][:-1])
    B = [list(row[:-1]) for row in U[1:]]  # rows are basis vectors
    return J, s, columns_to_matrix(B)


# residue machinery -------------------------------------------------------------------

def _pole_group_terms(a, f, k):
    """Coefficient contributions {m: StepPolynomial} of E(a, f; t) for m >= N - k (without mu)."""
    N = len(a) - 1
    if f == 1:
        J, r = [], 0
    else:
        J, s, B = bezout_and_lattice(a, f)
        r = len(J)
    divisible = [x for x in a if x % f == 0]
    stats = {}
    if r == 0:
        cones = [(1, [], [], [])]  # sign, p, q-rays, gamma
        aJ = []
    else:
        aJ = [a[i] for i in J]
        Binv = inverse(B)
        sigma = mat_vec(Binv, list(s))
        rays = [tuple(Binv[i][j] for i in range(r)) for j in range(r)]
        pieces = barvinok_decompose(SimplicialCone((0,) * r, tuple(rays)), stats=stats)
        cones = []
        for piece in pieces:
            G = columns_to_matrix(piece.rays)
            gamma = mat_vec(inverse(G), sigma)
            amb = [mat_vec(B, list(g)) for g in piece.rays]
            cones.append((piece.sign, [dot(aJ, u) for u in amb], amb, gamma))
    singular = [u for _, ps, amb, _ in cones for p, u in zip(ps, amb) if p == 0]
    beta = find_regular_vector(singular, dim=r) if singular else None

    out = {}
    for sign, ps, amb, gamma in cones:
        qs = [dot(beta, u) for u in amb] if beta is not None else [0] * len(ps)
        series = _cone_series(ps, qs, divisible, k, r)
        for i in range(k + 1):
            m = N - i
            coeff = -Fraction((-1) ** m, factorial(m)) * f * sign
            sp = out.setdefault(m, StepPolynomial())
            for e, c in series.terms.items():
                if e[0] != i:
                    continue
                sp.add_term(c * coeff, [(gamma[j], e[1 + j]) for j in range(r)])
    return out, stats.get("max_index", 1)


def _cone_series(ps, qs, divisible, k, r):
    """x^(N+1) times the cone term, as a series in x (degree <= k) and y_1..y_r."""
    n0 = sum(1 for p in ps if p == 0)
    tm = TruncatedSeries(1 + r, k, laurent=True, weights=(1,) + (0,) * r, laurent_cap=n0)
    width = 2 + r
    x = tm.monomial((1,) + (0,) * (width - 1))
    eps = tm.monomial((0,) * (width - 1) + (1,))

    def unit(i):
        e = [0] * width
        e[i] = 1
        return tm.monomial(e)

    body = tm.constant(1)
    if r:
        lin = tm.like()
        for j, (p, q) in enumerate(zip(ps, qs)):
            lin = lin + unit(1 + j) * (tm.constant(p) + eps * q)
        body = (x * lin).compose([Fraction(1, factorial(n)) for n in range(k + 1)])
    bern = bernoulli_factor_coefficients(k)
    for p, q in zip(ps, qs):
        z = x * (tm.constant(p) + eps * q)
        body = body * z.compose(bern)
        if p:
            inv = tm.like({(0,) * (width - 1) + (n,): Fraction(1, p) * (Fraction(-q, p)) ** n
                           for n in range(n0 + 1)})
        else:
            inv = tm.monomial((0,) * (width - 1) + (-1,), Fraction(1, q))
        body = body * inv
    for alpha in divisible:
        body = body * (x * alpha).compose(bern).scale(Fraction(1, alpha))
    return residue_coeff(body, 0)


# public API --------------------------------------------------------------------------------

@dataclass
class TopKQuasiPolynomial:
    """sum_{m=N-k}^{N} E_m(t) t^m for the list a / g, where g = gcd(a)."""
    a: tuple
    g: int
    N: int
    k: int
    coefficients: dict
    max_dual_index: dict = field(default_factory=dict)

    def evaluate(self, t):
        return evaluate_topk(self, t)


def _group_job(args):
    a, f, k = args
    return _pole_group_terms(list(a), f, k)


def top_coefficients(a, k, jobs=1):
    a = _check_list(a)
    g = 0
    for x in a:
        g = gcd(g, x)
    a = [x // g for x in a]
    N = len(a) - 1
    if k < 0 or k > N:
        raise ValueError("k must lie in 0..N")
    poset = gcd_poset(a, k)
    groups = [f for f in poset.values if poset.mobius[f]]
    tasks = [(tuple(a), f, k) for f in groups]
    if jobs and jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_group_job, tasks))
    else:
        results = [_group_job(t) for t in tasks]
    coeffs = {m: StepPolynomial() for m in range(N - k, N + 1)}
    indices = {}
    for f, (terms, idx) in zip(groups, results):
        mu = poset.mobius[f]
        indices[f] = idx
        for m, sp in terms.items():
            coeffs[m] = coeffs[m] + sp.scale(mu)
    return TopKQuasiPolynomial(tuple(a), g, N, k, coeffs, indices)


def evaluate_topk(q, t):
    """sum_m E_m(t) t^m, with E(a; g t') = E(a/g; t') and 0 off multiples of g."""
    t = int(t)
    if t % q.g:
        return Fraction(0)
    t //= q.g
    return sum((sp.evaluate(t) * Fraction(t) ** m for m, sp in q.coefficients.items()),
               Fraction(0))


def coset_polynomials(a):
    """Full quasi-polynomial as one coefficient list (constant first) per residue mod the period."""
    a = _check_list(a)
    g = 0
    for x in a:
        g = gcd(g, x)
    period = 1
    for x in a:
        period = lcm(period, x // g)
    if period > LCM_GUARD:
        raise DomainError(f"period {period} exceeds the guard {LCM_GUARD}")
    q = top_coefficients(a, len(a) - 1)
    out = []
    for c in range(period):
        out.append([q.coefficients[m].evaluate(c) for m in range(q.N + 1)])
    return out


def format_topk(q):
    lines = [f"N {q.N} k {q.k} gcd {q.g}"]
    for m in sorted(q.coefficients, reverse=True):
        lines.append(f"E_{m}(T) = {format_step_polynomial(q.coefficients[m])}")
    return "\n".join(lines)


def parse_topk(text):
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    head = lines[0].split()
    if len(head) != 6 or head[0] != "N" or head[2] != "k" or head[4] != "gcd":
        raise ValueError("bad top-k header")
    N, k, g = int(head[1]), int(head[3]), int(head[5])
    coeffs = {}
    for ln in lines[1:]:
        m = re.fullmatch(r"E_(\d+)\(T\) = (.*)", ln.strip())
        if not m:
            raise ValueError(f"bad coefficient line {ln!r}")
        coeffs[int(m.group(1))] = parse_step_polynomial(m.group(2))
    return TopKQuasiPolynomial((), g, N, k, coeffs)


def format_coset_polynomials(polys):
    lines = []
    for c, coeffs in enumerate(polys):
        terms = " + ".join(f"{format_rational(v)}*t^{i}" for i, v in reversed(list(enumerate(coeffs))))
        lines.append(f"E^[{c}](t) = {terms}")
    return "\n".join(lines)


def parse_knapsack(text):
    tokens = text.split()
    if not tokens:
        raise ValueError("empty knapsack file")
    try:
        n = int(tokens[0])
        a = [int(x) for x in tokens[1:]]
    except ValueError:
        raise ValueError("knapsack file must contain integers") from None
    if len(a) != n:
        raise ValueError(f"expected {n} coefficients, found {len(a)}")
    return _check_list(a)


# periodicity -------------------------------------------------------------------------

def factorize(n):
    if n > FACTOR_CAP:
        raise DomainError(f"{n} exceeds the trial-division cap; supply its factorization")
    out = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


@dataclass(frozen=True)
class Periodicity:
    ell: int
    sublists: tuple
    mobius: dict

    @property
    def top_nonconstant_degree(self):
        """Degree of the highest strictly periodic coefficient (None if all constant)."""
        return self.ell - 1 if self.ell else None


def first_periodic_degree(a, factorizations=None):
    """Largest size ell of a sublist with gcd != 1, its maximal sublists and fan Moebius values."""
    a = _check_list(a)
    if factorizations is None:
        factorizations = [factorize(x) for x in a]
    by_prime = {}
    for i, fac in enumerate(factorizations):
        for p in fac:
            by_prime.setdefault(p, set()).add(i)
    ell = max((len(s) for s in by_prime.values()), default=0)
    if ell == 0:
        return Periodicity(0, (), {1: 1})
    sublists = sorted({tuple(sorted(s)) for s in by_prime.values() if len(s) == ell})
    gs = set()
    for sub in sublists:
        g = 0
        for i in sub:
            g = gcd(g, a[i])
        gs.add(g)
    mobius = {g: 1 for g in gs}
    mobius[1] = 1 - len(gs)
    return Periodicity(ell, tuple(sublists), mobius)


# oracle --------------------------------------------------------------------------------------

def denumerant_oracle(a, t):
    """Number of nonnegative integer solutions of sum a_i x_i = t by dynamic programming."""
    a = _check_list(a)
    if t < 0:
        return 0
    if t > ORACLE_CAP:
        raise DomainError(f"t = {t} exceeds the oracle cap {ORACLE_CAP}")
    ways = [1] + [0] * t
    for x in a:
        for v in range(x, t + 1):
            ways[v] += ways[v - x]
    return ways[t]


def denumerant_table(a, tmax):
    a = _check_list(a)
    ways = [1] + [0] * tmax
    for x in a:
        for v in range(x, tmax + 1):
            ways[v] += ways[v - x]
    return ways
