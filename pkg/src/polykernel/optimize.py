"""Upper and lower bounds for the maximum of a nonnegative polynomial.

Continuous bounds come from integrals of f^k over the polytope, discrete
bounds on boxes from lattice power sums.  The k-th roots involved are
irrational, so they are carried as exact radicals q^(1/n) and only turned
into decimals for display.
"""

import math
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction

from .exact_arith import as_rational, power_sum
from .integrate import TRIANGULATION, integrate_polynomial, integrate_polynomial_box
from .polyhedra import DomainError
from .polynomial import pow_expand

DIGITS = 50


def iroot(n, k):
    """floor(n^(1/k)) for integers n >= 0, k >= 1."""
    if n < 0 or k < 1:
        raise ValueError("iroot needs n >= 0 and k >= 1")
    if n < 2:
        return n
    x = 1 << -(-n.bit_length() // k)  # upper bound
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x ** k > n:
        x -= 1
    while (x + 1) ** k <= n:
        x += 1
    return x


@dataclass(frozen=True)
class Radical:
    """The nonnegative real number q^(1/n)."""
    q: Fraction
    n: int

    def __post_init__(self):
        if self.q < 0 or self.n < 1:
            raise ValueError("radical needs q >= 0 and n >= 1")

    def floor_scaled(self, digits=DIGITS):
        """floor(q^(1/n) * 10^digits) as an integer."""
        q = Fraction(self.q) * 10 ** (digits * self.n)
        return iroot(q.numerator // q.denominator, self.n)

    def decimal(self, digits=DIGITS):
        """Truncated (not rounded) decimal with exactly ``digits`` places."""
        with localcontext() as ctx:
            ctx.prec = digits + 40
            return Decimal(self.floor_scaled(digits)).scaleb(-digits)

    def __str__(self):
        return f"({self.q.numerator}/{self.q.denominator})^(1/{self.n})"

    def __float__(self):
        return float(self.decimal(20))

    def _cmp(self, other):
        if not isinstance(other, Radical):
            other = Radical(as_rational(other) if not isinstance(other, Fraction) else other, 1)
        a = self.q ** other.n
        b = other.q ** self.n
        return (a > b) - (a < b)

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def equals(self, other):
        return self._cmp(other) == 0


@dataclass(frozen=True)
class BoundsReport:
    k: int
    L_k: Radical
    U_k: Radical
    M: Fraction
    L: Fraction
    eps_prime: Fraction
    k0: int
    integral: Fraction
    volume: Fraction

    def row(self, digits=2):
        return (self.k, round(float(self.L_k), digits), round(float(self.U_k), digits))


def lipschitz_constant(f, M):
    """sum |c| deg(m) M^(deg(m)-1): an infinity-norm gradient bound on [-M, M]^d."""
    M = as_rational(M)
    total = Fraction(0)
    for m, c in f.terms():
        deg = sum(m)
        if deg:
            total += abs(c) * deg * M ** (deg - 1)
    return total


def crude_upper_bound(f, R):
    """sum |c| R^deg(m) >= max |f| on [-R, R]^d."""
    R = as_rational(R)
    return sum((abs(c) * R ** sum(m) for m, c in f.terms()), Fraction(0))


def _geometry(P):
    verts = P.vertices()
    d = P.dim
    width = max(max(v[i] for v in verts) - min(v[i] for v in verts) for i in range(d))
    radius = max(abs(x) for v in verts for x in v)
    return verts, width, radius


def integral_of_power(f, P, k, method=TRIANGULATION, jobs=1):
    box = P.box_bounds()
    if box is not None:
        return integrate_polynomial_box(box[0], box[1], pow_expand(f, k))
    return integrate_polynomial(P, pow_expand(f, k), method, jobs)


def continuous_bounds(f, P, k, L=None, U=None, method=TRIANGULATION, jobs=1):
    """L_k <= max_P f <= U_k from the integral of f^k (f >= 0 on P)."""
    if k < 1:
        raise ValueError("k must be positive")
    verts, M, R = _geometry(P)
    for v in verts:
        if f.evaluate(v) < 0:
            raise DomainError(f"f is negative at vertex {v}; shift f first (for example by the Handelman s)")
    d = P.dim
    L = lipschitz_constant(f, R) if L is None else as_rational(L)
    U = crude_upper_bound(f, R) if U is None else as_rational(U)
    if L == 0:
        raise DomainError("Lipschitz constant is zero; f is constant")
    k0 = max(1, math.ceil(d * (U / (M * L) - 1)))
    vol = P.volume()
    integral = integral_of_power(f, P, k, method, jobs)
    mean = integral / vol
    eps = Fraction(d, d + k)
    lower = Radical(mean, k)
    upper = Radical(mean * (M * L / eps) ** d / (1 - eps) ** k, d + k)
    return BoundsReport(k, lower, upper, M, L, eps, k0, integral, vol)


def choose_k_terms(eps, U, M, L, d, delta=0.1, c_delta=4.05):
    eps, U, M, L = (float(x) for x in (eps, U, M, L))
    return [
        d * (U / (M * L) - 1),
        d / ((eps + 1) ** (1 / 3) - 1),
        3 * d * math.log(U * M * L) * (1 + 1 / eps),
        d * ((3 * c_delta) ** (1 + delta) * (1 + 1 / eps) ** (1 + delta) - 1),
    ]


def choose_k(eps, U, M, L, d, delta=0.1, c_delta=4.05):
    """A k that guarantees U_k - L_k <= eps * f_max."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    return math.ceil(max(choose_k_terms(eps, U, M, L, d, delta, c_delta)))


@dataclass(frozen=True)
class DiscreteBounds:
    k: int
    L_k: Radical
    U_k: Radical
    power_sum: Fraction
    count: int


def lattice_sum(f, lower, upper):
    """Sum of f over the integer points of the box, monomial by monomial."""
    total = Fraction(0)
    for m, c in f.terms():
        term = c
        for lo, hi, e in zip(lower, upper, m):
            term *= power_sum(lo, hi, e)
        total += term
    return total


def discrete_bounds_box(f, lower, upper, k):
    """(sum f^k / N)^(1/k) <= max f <= (sum f^k)^(1/k) over the box's lattice points."""
    if any(int(x) != x for x in list(lower) + list(upper)):
        raise DomainError("discrete bounds need integer box bounds")
    lower = [int(x) for x in lower]
    upper = [int(x) for x in upper]
    if any(lo > hi for lo, hi in zip(lower, upper)):
        raise DomainError("empty box")
    count = 1
    for lo, hi in zip(lower, upper):
        count *= hi - lo + 1
    S = lattice_sum(pow_expand(f, k), lower, upper)
    if S < 0:
        raise DomainError("power sum is negative; f is not nonnegative on the box")
    return DiscreteBounds(k, Radical(S / count, k), Radical(S, k), S, count)
