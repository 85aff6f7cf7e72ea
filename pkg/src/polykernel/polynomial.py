"""Sparse multivariate polynomials stored in a burst trie.

Internal trie nodes split on one variable and keep the exponent range seen
for it; leaves are short sorted lists of (exponent, coefficient) pairs that
burst once they outgrow ``BURST_THRESHOLD``.
"""

import bisect
import itertools
import json
import re
from fractions import Fraction
from math import comb, factorial

from .exact_arith import as_rational

BURST_THRESHOLD = 10


class _Leaf:
    __slots__ = ("keys", "values")

    def __init__(self):
        self.keys = []
        self.values = []

    def __len__(self):
        return len(self.keys)


class _Node:
    """Splits on ``var``; children[i] holds exponent lo + i."""

    __slots__ = ("var", "lo", "hi", "children")

    def __init__(self, var, lo, hi):
        self.var = var
        self.lo = lo
        self.hi = hi
        self.children = [None] * (hi - lo + 1)

    def slot(self, exponent):
        if exponent < self.lo:
            self.children[:0] = [None] * (self.lo - exponent)
            self.lo = exponent
        elif exponent > self.hi:
            self.children.extend([None] * (exponent - self.hi))
            self.hi = exponent
        return exponent - self.lo


class BurstTrie:
    def __init__(self, dim, threshold=BURST_THRESHOLD):
        self.dim = dim
        self.threshold = threshold
        self.root = _Leaf()
        self.size = 0

    def add(self, mono, c):
        """Accumulate c onto the coefficient of mono; zero results are removed."""
        parent, idx, node = None, None, self.root
        while isinstance(node, _Node):
            i = node.slot(mono[node.var])
            child = node.children[i]
            if child is None:
                child = node.children[i] = _Leaf()
            parent, idx, node = node, i, child
        pos = bisect.bisect_left(node.keys, mono)
        if pos < len(node.keys) and node.keys[pos] == mono:
            v = node.values[pos] + c
            if v:
                node.values[pos] = v
            else:
                del node.keys[pos]
                del node.values[pos]
                self.size -= 1
            return
        if not c:
            return
        node.keys.insert(pos, mono)
        node.values.insert(pos, c)
        self.size += 1
        if len(node) > self.threshold:
            burst = self._burst(node)
            if burst is not None:
                if parent is None:
                    self.root = burst
                else:
                    parent.children[idx] = burst

    def _burst(self, leaf):
        for v in range(self.dim):
            exps = [k[v] for k in leaf.keys]
            lo, hi = min(exps), max(exps)
            if lo != hi:
                break
        else:
            return None
        node = _Node(v, lo, hi)
        for k, c in zip(leaf.keys, leaf.values):
            i = k[v] - lo
            child = node.children[i]
            if child is None:
                child = node.children[i] = _Leaf()
            child.keys.append(k)
            child.values.append(c)
        return node

    def get(self, mono):
        node = self.root
        while isinstance(node, _Node):
            e = mono[node.var]
            if e < node.lo or e > node.hi:
                return Fraction(0)
            node = node.children[e - node.lo]
            if node is None:
                return Fraction(0)
        pos = bisect.bisect_left(node.keys, mono)
        if pos < len(node.keys) and node.keys[pos] == mono:
            return node.values[pos]
        return Fraction(0)

    def __iter__(self):
        stack = [self.root]
        while stack:
            node = stack.pop()
            if isinstance(node, _Leaf):
                yield from zip(node.keys, node.values)
            else:
                stack.extend(ch for ch in reversed(node.children) if ch is not None)

    def leaves(self):
        stack = [self.root]
        while stack:
            node = stack.pop()
            if isinstance(node, _Leaf):
                yield node
            else:
                stack.extend(ch for ch in node.children if ch is not None)


class SparsePolynomial:
    def __init__(self, dim, terms=None, threshold=BURST_THRESHOLD):
        self.dim = dim
        self._trie = BurstTrie(dim, threshold)
        if terms:
            items = terms.items() if isinstance(terms, dict) else terms
            for mono, c in items:
                self.insert(mono, c)

    @classmethod
    def constant(cls, dim, c):
        return cls(dim, {(0,) * dim: c})

    @classmethod
    def variable(cls, dim, i):
        e = [0] * dim
        e[i] = 1
        return cls(dim, {tuple(e): 1})

    def insert(self, mono, c):
        mono = tuple(int(x) for x in mono)
        if len(mono) != self.dim:
            raise ValueError(f"monomial {mono} does not have {self.dim} exponents")
        if any(x < 0 for x in mono):
            raise ValueError("exponents must be nonnegative")
        self._trie.add(mono, as_rational(c))
        return self

    @property
    def trie(self):
        return self._trie

    def terms(self):
        return sorted(self._trie)

    def as_dict(self):
        return dict(self._trie)

    def coefficient(self, mono):
        return self._trie.get(tuple(mono))

    def __len__(self):
        return self._trie.size

    def __iter__(self):
        return iter(self.terms())

    def is_zero(self):
        return self._trie.size == 0

    def degree(self):
        return max((sum(m) for m, _ in self._trie), default=0)

    def __eq__(self, other):
        if not isinstance(other, SparsePolynomial):
            return NotImplemented
        return self.dim == other.dim and self.as_dict() == other.as_dict()

    def __add__(self, other):
        out = SparsePolynomial(self.dim, self._trie)
        for m, c in other._trie:
            out.insert(m, c)
        return out

    def __neg__(self):
        return SparsePolynomial(self.dim, {m: -c for m, c in self._trie})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = as_rational(c)
        return SparsePolynomial(self.dim, {m: c * v for m, v in self._trie} if c else None)

    def __mul__(self, other):
        if not isinstance(other, SparsePolynomial):
            return self.scale(other)
        acc = {}
        for m1, c1 in self._trie:
            for m2, c2 in other._trie:
                m = tuple(a + b for a, b in zip(m1, m2))
                acc[m] = acc.get(m, 0) + c1 * c2
        return SparsePolynomial(self.dim, acc)

    def evaluate(self, x):
        if len(x) != self.dim:
            raise ValueError("point has the wrong dimension")
        x = [as_rational(v) for v in x]
        total = Fraction(0)
        for m, c in self._trie:
            term = c
            for xi, e in zip(x, m):
                if e:
                    term *= xi ** e
            total += term
        return total

    def __repr__(self):
        return f"SparsePolynomial({self.dim}, {self.terms()!r})"


def pow_expand(p, k):
    if k < 0:
        raise ValueError("power must be nonnegative")
    result = SparsePolynomial.constant(p.dim, 1)
    base = p
    while k:
        if k & 1:
            result = result * base
        k >>= 1
        if k:
            base = base * base
    return result


def affine_power_product(forms, exps, dim):
    """Expand prod_i (b_i + a_i.x)^{e_i}; forms are (b_i, a_i) pairs."""
    out = SparsePolynomial.constant(dim, 1)
    for (b, a), e in zip(forms, exps):
        if e:
            g = SparsePolynomial(dim, {(0,) * dim: b})
            for i, ai in enumerate(a):
                if ai:
                    g.insert(tuple(1 if j == i else 0 for j in range(dim)), ai)
            out = out * pow_expand(g, e)
    return out


class LinearFormSum:
    """Weighted sum of powers of linear forms, keyed by (form, power)."""

    def __init__(self, dim):
        self.dim = dim
        self.terms = {}

    def add(self, coef, form, power):
        form = tuple(as_rational(v) for v in form)
        if len(form) != self.dim:
            raise ValueError("linear form has the wrong dimension")
        if power == 0:
            form = (Fraction(0),) * self.dim
        elif not any(form):
            return
        key = (form, power)
        v = self.terms.get(key, 0) + as_rational(coef)
        if v:
            self.terms[key] = v
        else:
            self.terms.pop(key, None)

    def __iter__(self):
        for (form, power), c in sorted(self.terms.items()):
            yield c, form, power

    def __len__(self):
        return len(self.terms)

    def evaluate(self, x):
        x = [as_rational(v) for v in x]
        total = Fraction(0)
        for c, form, power in self:
            total += c * sum(a * b for a, b in zip(form, x)) ** power
        return total


def monomial_to_linear_forms(m, coef=1, out=None):
    dim = len(m)
    if out is None:
        out = LinearFormSum(dim)
    total = sum(m)
    coef = as_rational(coef)
    if total == 0:
        out.add(coef, (0,) * dim, 0)
        return out
    scale = coef / factorial(total)
    for p in itertools.product(*(range(mi + 1) for mi in m)):
        sp = sum(p)
        if sp == 0:
            continue
        w = 1
        for mi, pi in zip(m, p):
            w *= comb(mi, pi)
        sign = -1 if (total - sp) % 2 else 1
        out.add(scale * sign * w, p, total)
    return out


def to_linear_forms(p):
    out = LinearFormSum(p.dim)
    for m, c in p.terms():
        monomial_to_linear_forms(m, c, out)
    return out


# text format: [[c, [e1, ..., ed]], ...]

_RATIONAL_TOKEN = re.compile(r"(-?\d+\s*/\s*\d+)")


def parse_polynomial(text, dim=None):
    """Parse "[[c,[e1,...,ed]],...]" where c is an integer or "n/m"."""
    quoted = _RATIONAL_TOKEN.sub(lambda mt: '"' + mt.group(1).replace(" ", "") + '"',
                                 text.replace('"', ""))
    try:
        data = json.loads(quoted)
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed polynomial text: {exc}") from None
    if not isinstance(data, list):
        raise ValueError("polynomial text must be a list of [coefficient, exponents] pairs")
    for entry in data:
        if (not isinstance(entry, list) or len(entry) != 2 or not isinstance(entry[1], list)
                or not all(isinstance(e, int) and not isinstance(e, bool) for e in entry[1])):
            raise ValueError(f"bad polynomial term {entry!r}")
    if dim is None:
        if not data:
            raise ValueError("cannot infer the dimension of an empty polynomial")
        dim = len(data[0][1])
    poly = SparsePolynomial(dim)
    for c, mono in data:
        if isinstance(c, float):
            raise ValueError("floating-point coefficients are not exact; use n/m")
        poly.insert(mono, as_rational(c) if isinstance(c, str) else Fraction(c))
    return poly


def format_polynomial(p):
    parts = []
    for m, c in p.terms():
        cs = str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
        parts.append(f"[{cs},[{','.join(str(e) for e in m)}]]")
    return "[" + ",".join(parts) + "]"
