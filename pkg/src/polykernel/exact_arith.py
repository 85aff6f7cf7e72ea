"""Exact scalars, truncated multivariate series, Bernoulli numbers and power sums."""

from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

Rational = Fraction


def as_rational(value):
    """Coerce ints, Fractions and "n/m" strings to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if not text:
            raise ValueError("empty rational literal")
        return Fraction(text)
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def format_rational(q):
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


class SeriesStructureError(ValueError):
    pass


class TruncatedSeries:
    """Multivariate series truncated at a weighted total degree.

    Exponent tuples hold one entry per ordinary variable followed, when
    ``laurent`` is set, by the exponent of a single Laurent variable that may
    go negative.  The truncation degree counts ordinary variables only, each
    with its weight (default 1).  ``laurent_cap`` optionally drops terms whose
    Laurent exponent exceeds the cap; callers choose it so that dropped terms
    cannot contribute to the coefficient they finally read.
    """

    __slots__ = ("nvars", "max_degree", "laurent", "weights", "laurent_cap", "terms")

    def __init__(self, nvars, max_degree, terms=None, laurent=False, weights=None,
                 laurent_cap=None):
        if max_degree < 0:
            raise ValueError("truncation degree must be nonnegative")
        self.nvars = nvars
        self.max_degree = max_degree
        self.laurent = laurent
        self.weights = tuple(weights) if weights is not None else (1,) * nvars
        if len(self.weights) != nvars:
            raise SeriesStructureError("one weight per ordinary variable is required")
        self.laurent_cap = laurent_cap
        self.terms = {}
        if terms:
            for e, c in terms.items():
                self._accumulate(tuple(e), c)

    # structure helpers

    def _width(self):
        return self.nvars + (1 if self.laurent else 0)

    def degree_of(self, e):
        return sum(w * x for w, x in zip(self.weights, e))

    def _keeps(self, e):
        if len(e) != self._width():
            raise SeriesStructureError(f"exponent {e} has the wrong length")
        if any(x < 0 for x in e[:self.nvars]):
            raise SeriesStructureError("only the Laurent variable may carry negative exponents")
        if self.degree_of(e) > self.max_degree:
            return False
        if self.laurent and self.laurent_cap is not None and e[-1] > self.laurent_cap:
            return False
        return True

    def _accumulate(self, e, c):
        if not c or not self._keeps(e):
            return
        v = self.terms.get(e, 0) + c
        if v:
            self.terms[e] = Fraction(v)
        else:
            self.terms.pop(e, None)

    def like(self, terms=None):
        return TruncatedSeries(self.nvars, self.max_degree, terms, self.laurent,
                               self.weights, self.laurent_cap)

    def compatible(self, other):
        return (self.nvars == other.nvars and self.laurent == other.laurent
                and self.weights == other.weights)

    def _check(self, other):
        if not self.compatible(other):
            raise SeriesStructureError("series have different variable layouts")

    # constructors

    def constant(self, c):
        return self.like({(0,) * self._width(): Fraction(c)})

    def monomial(self, e, c=1):
        return self.like({tuple(e): Fraction(c)})

    def linear(self, coeffs, laurent_coeff=0):
        """Series of sum_i coeffs[i] t_i (+ laurent_coeff * eps)."""
        w = self._width()
        out = self.like()
        for i, c in enumerate(coeffs):
            if c:
                e = [0] * w
                e[i] = 1
                out._accumulate(tuple(e), Fraction(c))
        if laurent_coeff:
            if not self.laurent:
                raise SeriesStructureError("series has no Laurent variable")
            e = [0] * w
            e[-1] = 1
            out._accumulate(tuple(e), Fraction(laurent_coeff))
        return out

    # arithmetic

    def __add__(self, other):
        if not isinstance(other, TruncatedSeries):
            return self + self.constant(other)
        self._check(other)
        out = self.like(self.terms)
        for e, c in other.terms.items():
            out._accumulate(e, c)
        return out

    __radd__ = __add__

    def __neg__(self):
        return self.like({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, TruncatedSeries):
            return self + (-Fraction(other))
        return self + (-other)

    def scale(self, c):
        c = Fraction(c)
        if not c:
            return self.like()
        return self.like({e: c * v for e, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            return truncated_mul(self, other, min(self.max_degree, other.max_degree))
        return self.scale(other)

    __rmul__ = __mul__

    def __pow__(self, k):
        result = self.constant(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.compatible(other) and self.terms == other.terms

    def __repr__(self):
        return f"TruncatedSeries({self.terms!r}, M={self.max_degree})"

    def coefficient(self, e):
        return self.terms.get(tuple(e), Fraction(0))

    def is_zero(self):
        return not self.terms

    def min_laurent_exponent(self):
        if not self.laurent or not self.terms:
            return 0
        return min(e[-1] for e in self.terms)

    def homogeneous_part(self, degree):
        return self.like({e: c for e, c in self.terms.items() if self.degree_of(e) == degree})

    def compose(self, coeffs):
        """Return sum_k coeffs[k] * self**k, truncated (Horner scheme)."""
        out = self.like()
        for c in reversed(coeffs):
            out = out * self + c
        return out


def truncated_mul(a, b, M):
    """Product of two series with every term above weighted degree M discarded."""
    if not isinstance(a, TruncatedSeries) or not isinstance(b, TruncatedSeries):
        raise SeriesStructureError("truncated_mul expects two TruncatedSeries")
    a._check(b)
    cap = a.laurent_cap
    if b.laurent_cap is not None:
        cap = b.laurent_cap if cap is None else min(cap, b.laurent_cap)
    out = TruncatedSeries(a.nvars, M, None, a.laurent, a.weights, cap)
    bt = [(e, c, b.degree_of(e)) for e, c in b.terms.items()]
    acc = {}
    for ea, ca in a.terms.items():
        da = a.degree_of(ea)
        if da > M:
            continue
        for eb, cb, db in bt:
            if da + db > M:
                continue
            e = tuple(x + y for x, y in zip(ea, eb))
            if cap is not None and a.laurent and e[-1] > cap:
                continue
            acc[e] = acc.get(e, 0) + ca * cb
    out.terms = {e: Fraction(c) for e, c in acc.items() if c}
    return out


def exp_series(coeffs, M, template=None):
    """Truncation of exp(<c, t>) at total degree M.

    ``template`` fixes the variable layout; without it a plain series in
    len(coeffs) variables is used.
    """
    if template is None:
        template = TruncatedSeries(len(coeffs), M)
    else:
        template = TruncatedSeries(template.nvars, M, None, template.laurent,
                                   template.weights, template.laurent_cap)
    z = template.linear(coeffs)
    return z.compose([Fraction(1, factorial(k)) for k in range(M + 1)])


@lru_cache(maxsize=None)
def bernoulli(k):
    """B_k by the Akiyama-Tanigawa recurrence, with B_1 = -1/2."""
    if k < 0:
        raise ValueError("Bernoulli index must be nonnegative")
    a = [Fraction(0)] * (k + 1)
    for i in range(k + 1):
        a[i] = Fraction(1, i + 1)
        for j in range(i, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
    return -a[0] if k == 1 else a[0]


def bernoulli_factor_coefficients(M):
    """Coefficients of z/(1 - e^z) = -sum_k B_k z^k / k! up to z^M."""
    return [-bernoulli(k) / factorial(k) for k in range(M + 1)]


def bernoulli_factor_series(coeffs, M, template=None):
    """Truncation of <c,t>/(1 - e^{<c,t>}) at total degree M."""
    if not any(coeffs):
        raise ValueError("the linear form must be nonzero")
    if template is None:
        template = TruncatedSeries(len(coeffs), M)
    else:
        template = TruncatedSeries(template.nvars, M, None, template.laurent,
                                   template.weights, template.laurent_cap)
    return template.linear(coeffs).compose(bernoulli_factor_coefficients(M))


@lru_cache(maxsize=None)
def faulhaber_coefficients(p):
    """Coefficients c_0..c_{p+1} with sum_{j=1}^n j^p = sum_i c_i n^i."""
    coeffs = [Fraction(0)] * (p + 2)
    for j in range(p + 1):
        b = bernoulli(j)
        if j == 1:
            b = -b  # the power-sum identity wants B_1 = +1/2
        coeffs[p + 1 - j] += Fraction(comb(p + 1, j)) * b / (p + 1)
    return tuple(coeffs)


def faulhaber(n, p):
    """Closed-form sum_{j=1}^n j^p; valid as a polynomial identity in n."""
    if p < 0:
        raise ValueError("power must be nonnegative")
    n = Fraction(n)
    total = Fraction(0)
    for c in reversed(faulhaber_coefficients(p)):
        total = total * n + c
    return total


def power_sum(lo, hi, p):
    """sum_{j=lo}^{hi} j^p for integers lo <= hi (0^0 counts as 1)."""
    if hi < lo:
        return Fraction(0)
    return faulhaber(hi, p) - faulhaber(lo - 1, p)


def residue_coeff(s, order):
    """Coefficient of eps^order of a series with Laurent variable eps.

    Returns a Fraction when there are no ordinary variables, otherwise the
    coefficient series in the ordinary variables.
    """
    if not s.laurent:
        raise SeriesStructureError("series has no Laurent variable")
    if s.nvars == 0:
        return s.terms.get((order,), Fraction(0))
    out = TruncatedSeries(s.nvars, s.max_degree, None, False, s.weights)
    for e, c in s.terms.items():
        if e[-1] == order:
            out.terms[e[:-1]] = c
    return out


def univariate(coeffs, M):
    """Series in one variable from a coefficient list."""
    return TruncatedSeries(1, M, {(i,): Fraction(c) for i, c in enumerate(coeffs) if c})


def inverse_linear_series(c, b, M):
    """1/(c + b*e) as a power series in e up to e^M (c != 0)."""
    c = Fraction(c)
    b = Fraction(b)
    r = -b / c
    return univariate([r ** j / c for j in range(M + 1)], M)
