"""Exact-cover search for set-partition systems with dancing links.

Each equation sum_{j in row} x_j = 1 is a row of a sparse 0/1 matrix.  Row
headers sit in a circular vertical list anchored at the root; each row
header also heads its own horizontal list of variable nodes.  Nodes for the
same variable form a circular vertical list.  Covering a row removes it
from the header list and detaches, horizontally, every other node of the
variables it contains, which is exactly the propagation of "one of these is 1,
so every other row using them loses them".
"""

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .exact_arith import format_rational
from .polyhedra import DomainError

ROOT = 0


class LifoViolation(RuntimeError):
    pass


class DlxMatrix:
    """Arena-backed linked structure; node 0 is the root, 1..R are row headers."""

    def __init__(self, rows, debug=False):
        rows = [list(r) for r in rows]
        self.debug = debug
        self.infeasible = False
        self.row_count = len(rows)
        self.L, self.R, self.U, self.D, self.H, self.var = [], [], [], [], [], []
        self._new(None)  # root
        for r, vars_ in enumerate(rows):
            if any((not isinstance(v, int)) or v < 0 for v in vars_):
                raise ValueError("variable ids must be nonnegative integers")
            if len(set(vars_)) != len(vars_):
                raise ValueError(f"row {r} repeats a variable")
            if not vars_:
                self.infeasible = True
        headers = [self._new(None) for _ in rows]
        # vertical header list through the root
        ring = [ROOT] + headers
        for a, b in zip(ring, ring[1:] + ring[:1]):
            self.D[a] = b
            self.U[b] = a
        last_in_column = {}
        first_in_column = {}
        for h, vars_ in zip(headers, rows):
            self.H[h] = h
            prev = h
            for v in vars_:
                n = self._new(v)
                self.H[n] = h
                self.R[prev] = n
                self.L[n] = prev
                prev = n
                if v in last_in_column:
                    self.D[last_in_column[v]] = n
                    self.U[n] = last_in_column[v]
                else:
                    first_in_column[v] = n
                last_in_column[v] = n
            self.R[prev] = h
            self.L[h] = prev
        for v, first in first_in_column.items():
            last = last_in_column[v]
            self.D[last] = first
            self.U[first] = last
        self.headers = headers
        self.variables = sorted(first_in_column)
        self._covered = []
        self._initial = self.snapshot()

    def _new(self, var):
        n = len(self.L)
        for arr in (self.L, self.R, self.U, self.D, self.H):
            arr.append(n)
        self.var.append(var)
        return n

    @property
    def data_node_count(self):
        """Root plus one node per (row, variable) entry."""
        return 1 + sum(1 for v in self.var if v is not None)

    def snapshot(self):
        return (tuple(self.L), tuple(self.R), tuple(self.U), tuple(self.D))

    def is_restored(self):
        return self.snapshot() == self._initial

    # traversal helpers

    def live_rows(self):
        out = []
        h = self.D[ROOT]
        while h != ROOT:
            out.append(h)
            h = self.D[h]
        return out

    def row_nodes(self, h):
        out = []
        n = self.R[h]
        while n != h:
            out.append(n)
            n = self.R[n]
        return out

    def row_variables(self, h):
        return [self.var[n] for n in self.row_nodes(h)]

    # the two primitive operations

    def cover(self, n):
        self.U[self.D[n]] = self.U[n]
        self.D[self.U[n]] = self.D[n]
        i = self.R[n]
        while i != n:
            j = self.U[i]
            while j != i:
                self.R[self.L[j]] = self.R[j]
                self.L[self.R[j]] = self.L[j]
                j = self.U[j]
            i = self.R[i]
        self._covered.append(n)

    def uncover(self, n):
        if self.debug and (not self._covered or self._covered[-1] != n):
            raise LifoViolation(f"uncover({n}) does not match the last cover")
        if self._covered and self._covered[-1] == n:
            self._covered.pop()
        i = self.L[n]
        while i != n:
            j = self.D[i]
            while j != i:
                self.R[self.L[j]] = j
                self.L[self.R[j]] = j
                j = self.D[j]
            i = self.L[i]
        self.U[self.D[n]] = n
        self.D[self.U[n]] = n

    def unwind(self):
        """Uncover every outstanding cover in LIFO order."""
        while self._covered:
            self.uncover(self._covered[-1])


def select_first(m):
    return m.D[ROOT]


def select_fewest(m):
    best = None
    for h in m.live_rows():
        key = (len(m.row_nodes(h)), h)
        if best is None or key < best:
            best = key
    return best[1]


POLICIES = {"first": select_first, "fewest": select_fewest}


@dataclass
class SearchResult:
    solution: tuple  # sorted variable ids set to 1, or None when infeasible
    nodes: int = 0
    backtracks: int = 0
    restore_checks: int = 0

    @property
    def feasible(self):
        return self.solution is not None


def search(m, select="fewest", check_restore=False, node_limit=None):
    """Depth-first exact-cover search; the matrix is fully restored on return."""
    pick = POLICIES[select] if isinstance(select, str) else select
    if m.infeasible:
        return SearchResult(None)
    stack = []
    stats = {"nodes": 0, "backtracks": 0, "checks": 0}
    found = []

    def rec():
        stats["nodes"] += 1
        if node_limit is not None and stats["nodes"] > node_limit:
            raise _Abort()
        if m.D[ROOT] == ROOT:
            found.append(tuple(sorted(m.var[n] for n in stack)))
            return True
        r = pick(m)
        m.cover(r)
        ok = False
        n = m.R[r]
        while n != r:
            before = m.snapshot() if check_restore else None
            stack.append(n)
            j = m.U[n]
            while j != n:
                m.cover(m.H[j])
                j = m.U[j]
            ok = rec()
            stack.pop()
            j = m.D[n]
            while j != n:
                m.uncover(m.H[j])
                j = m.D[j]
            if check_restore:
                stats["checks"] += 1
                if m.snapshot() != before:
                    raise AssertionError("cover/uncover failed to restore the links")
            if ok:
                break
            stats["backtracks"] += 1
            n = m.R[n]
        m.uncover(r)
        return ok

    try:
        rec()
    except _Abort:
        m.unwind()
        return SearchResult(None, stats["nodes"], stats["backtracks"], stats["checks"])
    if check_restore and not m.is_restored():
        raise AssertionError("matrix not restored after search")
    sol = found[0] if found else None
    return SearchResult(sol, stats["nodes"], stats["backtracks"], stats["checks"])


class _Abort(Exception):
    pass


def solve_exact_cover(rows, select="fewest", check_restore=False):
    return search(DlxMatrix(rows, debug=check_restore), select, check_restore)


def brute_force(rows, nvars=None):
    """Exhaustive 0/1 oracle; returns the set of all solutions as sorted tuples."""
    vars_ = sorted({v for r in rows for v in r})
    sols = []
    for mask in range(1 << len(vars_)):
        ones = {v for i, v in enumerate(vars_) if mask >> i & 1}
        if all(sum(1 for v in r if v in ones) == 1 for r in rows):
            sols.append(tuple(sorted(ones)))
    return sols


# set-partition file format ----------------------------------------------------------------

def parse_set_partition(text):
    """First line "R V", then R lines of whitespace-separated variable ids."""
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise ValueError("empty set-partition file")
    try:
        R, V = (int(x) for x in lines[0].split())
        rows = [[int(x) for x in ln.split()] for ln in lines[1:]]
    except ValueError:
        raise ValueError("set-partition file must hold integers") from None
    if len(rows) != R:
        raise ValueError(f"expected {R} rows, found {len(rows)}")
    if any(v < 0 or v > V for r in rows for v in r):
        raise ValueError("variable id out of range")
    return rows


def format_solution(sol):
    return "SOLUTION " + " ".join(f"x{v}" for v in sol) if sol is not None else "INFEASIBLE"


# MILP fix-and-reduce ----------------------------------------------------------------------------

_TERM = re.compile(r"([+-]?\s*(?:\d+(?:/\d+)?)?)\s*\*?\s*([A-Za-z_]\w*)")


def _parse_linear(text):
    terms = {}
    text = text.strip()
    if not text:
        return terms
    pos = 0
    for m in _TERM.finditer(text):
        if text[pos:m.start()].strip():
            raise ValueError(f"cannot parse linear expression {text!r}")
        coef = m.group(1).replace(" ", "")
        if coef in ("", "+"):
            c = Fraction(1)
        elif coef == "-":
            c = Fraction(-1)
        else:
            c = Fraction(coef)
        terms[m.group(2)] = terms.get(m.group(2), 0) + c
        pos = m.end()
    if text[pos:].strip():
        raise ValueError(f"cannot parse linear expression {text!r}")
    return terms


def _format_linear(terms):
    if not terms:
        return "0"
    parts = []
    for name in sorted(terms):
        c = terms[name]
        parts.append(f"{'-' if c < 0 else '+'} {format_rational(abs(c))} {name}")
    text = " ".join(parts)
    return text[2:] if text.startswith("+ ") else "-" + text[2:].lstrip()


@dataclass
class Milp:
    objective: dict
    constraints: list  # (name, terms, rhs) meaning terms <= rhs
    partition: list  # (name, [y names]) meaning sum = 1
    integers: list
    offset: Fraction = Fraction(0)

    @property
    def partition_variables(self):
        seen = []
        for _, names in self.partition:
            for n in names:
                if n not in seen:
                    seen.append(n)
        return seen


def parse_milp(text):
    """Sections: OBJECTIVE, CONSTRAINTS, PARTITION, INTEGERS (one item per line)."""
    section = None
    obj, cons, part, ints = {}, [], [], []
    offset = Fraction(0)
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head = line.upper()
        if head in ("OBJECTIVE", "CONSTRAINTS", "PARTITION", "INTEGERS"):
            section = head
            continue
        if section == "OBJECTIVE":
            if line.upper().startswith("OFFSET"):
                offset += Fraction(line.split()[1])
            else:
                for k, v in _parse_linear(line).items():
                    obj[k] = obj.get(k, 0) + v
        elif section == "CONSTRAINTS":
            name, _, body = line.partition(":")
            if "<=" not in body:
                raise ValueError(f"constraint {line!r} must use <=")
            lhs, rhs = body.split("<=")
            cons.append((name.strip(), _parse_linear(lhs), Fraction(rhs.strip())))
        elif section == "PARTITION":
            name, _, body = line.partition(":")
            names = body.split()
            if not names:
                raise ValueError(f"partition row {name!r} is empty")
            part.append((name.strip(), names))
        elif section == "INTEGERS":
            ints.extend(line.split())
        else:
            raise ValueError("content before the first section header")
    return Milp(obj, cons, part, ints, offset)


def format_milp(milp):
    lines = ["OBJECTIVE", _format_linear(milp.objective)]
    if milp.offset:
        lines.append(f"OFFSET {format_rational(milp.offset)}")
    lines.append("CONSTRAINTS")
    for name, terms, rhs in milp.constraints:
        lines.append(f"{name}: {_format_linear(terms)} <= {format_rational(rhs)}")
    if milp.partition:
        lines.append("PARTITION")
        for name, names in milp.partition:
            lines.append(f"{name}: {' '.join(names)}")
    lines.append("INTEGERS")
    if milp.integers:
        lines.append(" ".join(milp.integers))
    return "\n".join(lines) + "\n"


def solve_partition(milp, select="fewest"):
    """Run the exact-cover search on the partition block; returns {y: 0/1}."""
    names = milp.partition_variables
    index = {n: i for i, n in enumerate(names)}
    rows = [[index[n] for n in ns] for _, ns in milp.partition]
    res = solve_exact_cover(rows, select)
    if not res.feasible:
        raise DomainError("partition block C y = 1 is infeasible")
    ones = set(res.solution)
    return {n: int(index[n] in ones) for n in names}


def fix_and_reduce(milp, y0):
    """Substitute y = y0 and return the reduced MILP over the remaining variables."""
    names = milp.partition_variables
    for n in names:
        if y0.get(n) not in (0, 1):
            raise DomainError(f"y0 gives no 0/1 value for {n}")
    for pname, ns in milp.partition:
        if sum(y0[n] for n in ns) != 1:
            raise DomainError(f"y0 violates partition row {pname}")
    ys = set(names)
    obj = {k: v for k, v in milp.objective.items() if k not in ys}
    offset = milp.offset + sum((v * y0[k] for k, v in milp.objective.items() if k in ys), Fraction(0))
    cons = []
    for name, terms, rhs in milp.constraints:
        fixed = sum((v * y0[k] for k, v in terms.items() if k in ys), Fraction(0))
        cons.append((name, {k: v for k, v in terms.items() if k not in ys}, rhs - fixed))
    ints = [v for v in milp.integers if v not in ys]
    return Milp(obj, cons, [], ints, offset)
