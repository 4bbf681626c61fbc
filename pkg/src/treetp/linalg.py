"""Finite polynomial matrices, structured constructors, minors and TP checks."""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations
from math import comb, factorial
from typing import Callable, Sequence

from .polyring import Polynomial, poly, NotDivisible

__all__ = [
    "PolyMatrix",
    "TPVerdict",
    "NonInvertibleDiagonal",
    "NotLowerTriangular",
    "BadIndexSet",
    "BudgetExceeded",
    "toeplitz",
    "hankel",
    "binomial",
    "power_toeplitz",
    "shift_delta",
    "diag_factorial",
    "e00",
    "identity",
    "diagonal",
    "build_structured",
    "sharp_scale",
    "minor_det",
    "det_bareiss",
    "det_laplace",
    "check_tp_order",
    "first_negative_minor",
    "aswe_sequence",
    "DEFAULT_BUDGET",
]

DEFAULT_BUDGET = 10**6

_ZERO = Polynomial.constant(0)
_ONE = Polynomial.constant(1)


class NonInvertibleDiagonal(ArithmeticError):
    pass


class NotLowerTriangular(ValueError):
    pass


class BadIndexSet(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    """More minors would be needed than the budget allows."""


class PolyMatrix:
    """Dense rows x cols matrix of Polynomial entries (immutable)."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries: Sequence[Sequence], cols: int | None = None):
        rows = [tuple(poly(e) for e in row) for row in entries]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != cols:
                raise ValueError("ragged matrix")
        self.rows = len(rows)
        self.cols = cols
        self.entries = tuple(rows)

    @classmethod
    def from_function(cls, rows: int, cols: int, f: Callable[[int, int], object]) -> "PolyMatrix":
        return cls([[f(i, j) for j in range(cols)] for i in range(rows)], cols)

    @classmethod
    def zeros(cls, rows: int, cols: int | None = None) -> "PolyMatrix":
        cols = rows if cols is None else cols
        return cls([[_ZERO] * cols for _ in range(rows)], cols)

    def __getitem__(self, ij) -> Polynomial:
        i, j = ij
        return self.entries[i][j]

    def row(self, i: int) -> tuple:
        return self.entries[i]

    def column(self, j: int) -> list:
        return [r[j] for r in self.entries]

    @property
    def shape(self):
        return (self.rows, self.cols)

    def __eq__(self, other):
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def block(self, rows: int, cols: int | None = None) -> "PolyMatrix":
        cols = rows if cols is None else cols
        if rows > self.rows or cols > self.cols:
            raise ValueError("block larger than matrix")
        return PolyMatrix([r[:cols] for r in self.entries[:rows]], cols)

    def map(self, f: Callable[[Polynomial], object]) -> "PolyMatrix":
        return PolyMatrix([[f(e) for e in r] for r in self.entries], self.cols)

    def substitute(self, mapping) -> "PolyMatrix":
        return self.map(lambda e: e.substitute(mapping))

    def transpose(self) -> "PolyMatrix":
        return PolyMatrix([list(c) for c in zip(*self.entries)], self.rows) if self.rows else PolyMatrix([], 0)

    T = property(transpose)

    def __add__(self, other: "PolyMatrix") -> "PolyMatrix":
        self._same_shape(other)
        return PolyMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)], self.cols)

    def __sub__(self, other: "PolyMatrix") -> "PolyMatrix":
        self._same_shape(other)
        return PolyMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)], self.cols)

    def scale(self, c) -> "PolyMatrix":
        c = poly(c)
        return self.map(lambda e: e * c)

    def _same_shape(self, other):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    def __matmul__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        cols_b = [other.column(j) for j in range(other.cols)]
        out = []
        for r in self.entries:
            nz = [(k, a) for k, a in enumerate(r) if a]
            row = []
            for col in cols_b:
                acc = _ZERO
                for k, a in nz:
                    b = col[k]
                    if b:
                        acc = acc + a * b
                row.append(acc)
            out.append(row)
        return PolyMatrix(out, other.cols)

    mul = __matmul__

    def is_lower_triangular(self) -> bool:
        return all(not self.entries[i][j] for i in range(self.rows) for j in range(i + 1, self.cols))

    def is_lower_hessenberg(self) -> bool:
        return all(not self.entries[i][j] for i in range(self.rows) for j in range(i + 2, self.cols))

    def is_constant(self) -> bool:
        return all(e.is_constant() for r in self.entries for e in r)

    def lower_tri_solve(self, rhs: "PolyMatrix") -> "PolyMatrix":
        """X with self @ X = rhs, by forward substitution and exact division."""
        n = self.rows
        if self.cols != n or rhs.rows != n:
            raise ValueError("need a square system")
        if not self.is_lower_triangular():
            raise NotLowerTriangular("matrix is not lower triangular")
        sol: list[list[Polynomial]] = []
        for i in range(n):
            d = self.entries[i][i]
            if not d:
                raise NonInvertibleDiagonal(f"zero diagonal entry at {i}")
            row = []
            for j in range(rhs.cols):
                acc = rhs.entries[i][j]
                for k in range(i):
                    a = self.entries[i][k]
                    if a and sol[k][j]:
                        acc = acc - a * sol[k][j]
                try:
                    row.append(acc.exact_div(d))
                except NotDivisible as exc:
                    raise NonInvertibleDiagonal(f"diagonal entry {d} does not divide row {i}") from exc
            sol.append(row)
        return PolyMatrix(sol, rhs.cols)

    def lower_tri_inverse(self) -> "PolyMatrix":
        for i in range(self.rows):
            d = self.entries[i][i]
            if not (d.is_constant() and d.constant_value() != 0):
                raise NonInvertibleDiagonal(f"diagonal entry {d} is not an invertible rational")
        return self.lower_tri_solve(identity(self.rows))

    def conjugate_by(self, b: "PolyMatrix") -> "PolyMatrix":
        """b^{-1} @ self @ b for lower-triangular b."""
        return b.lower_tri_solve(self @ b)

    # serialization
    def to_json(self) -> str:
        return json.dumps(
            {"rows": self.rows, "cols": self.cols, "entries": [[str(e) for e in r] for r in self.entries]}
        )

    @classmethod
    def from_json(cls, text: str) -> "PolyMatrix":
        data = json.loads(text)
        return cls([[poly(s) for s in r] for r in data["entries"]], data["cols"])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        for r in self.entries:
            w.writerow([str(e) for e in r])
        return buf.getvalue()

    def to_text(self, lower_only: bool = False) -> str:
        lines = []
        for i, r in enumerate(self.entries):
            items = r[: i + 1] if lower_only else r
            lines.append("  ".join(str(e) for e in items))
        return "\n".join(lines)

    def __repr__(self):
        return f"PolyMatrix({self.rows}x{self.cols})"


# structured constructors

def identity(n: int) -> PolyMatrix:
    return PolyMatrix.from_function(n, n, lambda i, j: 1 if i == j else 0)


def diagonal(d: Sequence) -> PolyMatrix:
    n = len(d)
    return PolyMatrix.from_function(n, n, lambda i, j: d[i] if i == j else 0)


def toeplitz(seq: Sequence, n: int) -> PolyMatrix:
    """(a_{i-j}) lower-triangular truncation."""
    if len(seq) < n:
        raise ValueError("sequence too short")
    s = [poly(a) for a in seq]
    return PolyMatrix.from_function(n, n, lambda i, j: s[i - j] if i >= j else _ZERO)


def hankel(seq: Sequence, n: int) -> PolyMatrix:
    """(a_{i+j}) truncation; needs 2n-1 terms."""
    if len(seq) < 2 * n - 1:
        raise ValueError("sequence too short")
    s = [poly(a) for a in seq]
    return PolyMatrix.from_function(n, n, lambda i, j: s[i + j])


def binomial(x, y, n: int) -> PolyMatrix:
    """Entry (i,j) = C(i,j) x^{i-j} y^j."""
    x, y = poly(x), poly(y)
    xp = [x ** k for k in range(n)]
    yp = [y ** k for k in range(n)]
    return PolyMatrix.from_function(n, n, lambda i, j: xp[i - j] * yp[j] * comb(i, j) if i >= j else _ZERO)


def power_toeplitz(x, n: int) -> PolyMatrix:
    x = poly(x)
    return toeplitz([x ** k for k in range(n)], n)


def shift_delta(n: int, cols: int | None = None) -> PolyMatrix:
    cols = n if cols is None else cols
    return PolyMatrix.from_function(n, cols, lambda i, j: 1 if j == i + 1 else 0)


def diag_factorial(n: int) -> PolyMatrix:
    return diagonal([factorial(i) for i in range(n)])


def e00(n: int) -> PolyMatrix:
    return PolyMatrix.from_function(n, n, lambda i, j: 1 if i == j == 0 else 0)


def build_structured(kind: str, n: int, **kw) -> PolyMatrix:
    builders = {
        "toeplitz": lambda: toeplitz(kw["seq"], n),
        "hankel": lambda: hankel(kw["seq"], n),
        "binomial": lambda: binomial(kw.get("x", 1), kw.get("y", 1), n),
        "power_toeplitz": lambda: power_toeplitz(kw["x"], n),
        "shift_delta": lambda: shift_delta(n),
        "diag_factorial": lambda: diag_factorial(n),
        "e00": lambda: e00(n),
        "identity": lambda: identity(n),
    }
    if kind not in builders:
        raise ValueError(f"unknown structured matrix kind {kind!r}")
    return builders[kind]()


def sharp_scale(a: PolyMatrix, d: Sequence | None = None) -> PolyMatrix:
    """Multiply entry (i,j), i >= j, by d_{j+1} * ... * d_i (default d_i = i)."""
    if not a.is_lower_triangular():
        raise NotLowerTriangular("sharp scaling needs a lower-triangular matrix")
    n = max(a.rows, a.cols)
    ds = [poly(i) for i in range(n)] if d is None else [poly(v) for v in d]
    prefix = [_ONE]
    for i in range(1, n):
        prefix.append(prefix[-1] * ds[i])

    def entry(i, j):
        e = a.entries[i][j]
        if not e:
            return e
        if d is None:
            return e.scale(Fraction(factorial(i), factorial(j)))
        w = _ONE
        for m in range(j + 1, i + 1):
            w = w * ds[m]
        return e * w

    return PolyMatrix.from_function(a.rows, a.cols, entry)


# determinants

def det_laplace(m: Sequence[Sequence[Polynomial]]) -> Polynomial:
    """Permutation expansion; meant for small sizes."""
    n = len(m)
    if n == 0:
        return _ONE
    total = _ZERO
    for perm in permutations(range(n)):
        inv = sum(1 for a in range(n) for b in range(a + 1, n) if perm[a] > perm[b])
        term = _ONE
        for i, j in enumerate(perm):
            e = m[i][j]
            if not e:
                term = _ZERO
                break
            term = term * e
        if term:
            total = total - term if inv % 2 else total + term
    return total


def _bareiss_int(m: list[list]) -> Fraction | int:
    n = len(m)
    a = [list(r) for r in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                v = akk * row_i[j] - aik * row_k[j]
                row_i[j] = v // prev if isinstance(v, int) and isinstance(prev, int) else v / prev
            row_i[k] = 0
        prev = akk
    return sign * a[n - 1][n - 1]


def det_bareiss(m: Sequence[Sequence[Polynomial]]) -> Polynomial:
    """Fraction-free elimination; exact division over the polynomial ring."""
    n = len(m)
    if n == 0:
        return _ONE
    if all(e.is_constant() for r in m for e in r):
        vals = [[e.constant_value() for e in r] for r in m]
        if all(isinstance(v, int) for r in vals for v in r):
            return Polynomial.constant(_bareiss_int(vals))
        vals = [[Fraction(v) for v in r] for r in vals]
        return Polynomial.constant(_bareiss_int(vals))
    a = [list(r) for r in m]
    sign = 1
    prev = _ONE
    for k in range(n - 1):
        if not a[k][k]:
            for r in range(k + 1, n):
                if a[r][k]:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return _ZERO
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                v = akk * row_i[j]
                if aik and row_k[j]:
                    v = v - aik * row_k[j]
                row_i[j] = v.exact_div(prev) if v else v
            row_i[k] = _ZERO
        prev = akk
    d = a[n - 1][n - 1]
    return -d if sign < 0 else d


def minor_det(a: PolyMatrix, rows: Sequence[int], cols: Sequence[int], method: str = "bareiss") -> Polynomial:
    if len(rows) != len(cols):
        raise BadIndexSet("row and column sets differ in size")
    if len(set(rows)) != len(rows) or len(set(cols)) != len(cols):
        raise BadIndexSet("repeated index")
    if any(not 0 <= i < a.rows for i in rows) or any(not 0 <= j < a.cols for j in cols):
        raise BadIndexSet("index out of range")
    sub = [[a.entries[i][j] for j in cols] for i in rows]
    if method == "bareiss":
        return det_bareiss(sub)
    if method == "laplace":
        return det_laplace(sub)
    if method == "both":
        d1 = det_bareiss(sub)
        if len(sub) <= 4:
            d2 = det_laplace(sub)
            if d1 != d2:
                raise AssertionError(f"Bareiss {d1} and Laplace {d2} disagree on rows {rows} cols {cols}")
        return d1
    raise ValueError(f"unknown method {method!r}")


@dataclass
class TPVerdict:
    """Outcome of a TP_r check. ``inconclusive`` is set when the budget ran out."""

    ok: bool
    order: int
    minors_checked: int = 0
    witness: tuple | None = None
    inconclusive: bool = False
    notes: list = field(default_factory=list)

    @property
    def outcome(self) -> str:
        if self.inconclusive:
            return "inconclusive"
        return "pass" if self.ok else "fail"

    def describe(self) -> str:
        if self.inconclusive:
            return f"inconclusive after {self.minors_checked} minors (budget exhausted)"
        if self.ok:
            return f"TP_{self.order} holds on this truncation ({self.minors_checked} minors checked)"
        rows, cols, m = self.witness
        return f"TP_{self.order} fails: minor rows={list(rows)} cols={list(cols)} equals {m}"


def count_minors(rows: int, cols: int, r: int) -> int:
    return sum(comb(rows, k) * comb(cols, k) for k in range(1, min(r, rows, cols) + 1))


def check_tp_order(a: PolyMatrix, r: int, budget: int | None = None, crosscheck: bool = False) -> TPVerdict:
    """Check every minor of size <= r for coefficientwise nonnegativity.

    Minors are visited by size, then lexicographically by row set and column
    set; the first negative one is returned as witness. If more than
    ``budget`` minors would be needed the verdict is inconclusive and no
    minor is computed.
    """
    if r < 1:
        raise ValueError("order must be at least 1")
    if budget is None:
        budget = int(os.environ.get("TREETP_MINOR_BUDGET", DEFAULT_BUDGET))
    need = count_minors(a.rows, a.cols, r)
    if need > budget:
        return TPVerdict(ok=False, order=r, minors_checked=0, inconclusive=True,
                         notes=[f"{need} minors exceed budget {budget}"])
    method = "both" if crosscheck else "bareiss"
    checked = 0
    for k in range(1, min(r, a.rows, a.cols) + 1):
        for rows in combinations(range(a.rows), k):
            for cols in combinations(range(a.cols), k):
                d = minor_det(a, rows, cols, method=method)
                checked += 1
                if not d.is_nonneg():
                    return TPVerdict(ok=False, order=r, minors_checked=checked, witness=(rows, cols, d))
    return TPVerdict(ok=True, order=r, minors_checked=checked)


def first_negative_minor(a: PolyMatrix, k: int):
    """First minor of size exactly k (same order as check_tp_order) that is not nonnegative."""
    for rows in combinations(range(a.rows), k):
        for cols in combinations(range(a.cols), k):
            d = minor_det(a, rows, cols)
            if not d.is_nonneg():
                return rows, cols, d
    return None


def aswe_sequence(c, gamma, alpha: Sequence, beta: Sequence, n: int) -> list[Polynomial]:
    """First n coefficients of C e^{gamma t} prod (1+alpha_i t) / prod (1-beta_i t)."""
    from .series import TruncSeries, exp_series, geometric

    order = max(n - 1, 0)
    s = TruncSeries([c], order)
    if gamma is not None:
        s = s * exp_series(gamma, order)
    for a in alpha:
        s = s * TruncSeries([1, a], order)
    for b in beta:
        s = s * geometric(b, order)
    return list(s.coeffs[:n])
