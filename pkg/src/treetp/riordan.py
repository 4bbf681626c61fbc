"""Riordan arrays, production and output matrices, AZ/EAZ matrices."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Sequence

from .linalg import (
    PolyMatrix,
    binomial,
    identity,
    sharp_scale,
    shift_delta,
    toeplitz,
)
from .polyring import Polynomial, poly
from .series import TruncSeries

__all__ = [
    "RiordanSpec",
    "AZSpec",
    "InsufficientOrder",
    "FlavorMismatch",
    "NotHessenberg",
    "riordan_matrix",
    "riordan_product",
    "output_matrix",
    "production_matrix",
    "az_matrix",
    "spec_conversions",
    "az_from_fg",
    "fg_from_az",
    "phi_psi_from_az",
    "az_from_phi_psi",
    "eaz_phi_psi_factorization",
    "rowgen_matrix",
    "zeroth_first_test",
    "hankel_of_output",
]

_ZERO = Polynomial.constant(0)
_ONE = Polynomial.constant(1)

ORDINARY = "ordinary"
EXPONENTIAL = "exponential"


class InsufficientOrder(ValueError):
    pass


class FlavorMismatch(ValueError):
    pass


class NotHessenberg(ValueError):
    pass


def _series(s, order=None) -> TruncSeries:
    if isinstance(s, TruncSeries):
        return s
    return TruncSeries(list(s), order)


@dataclass(frozen=True)
class RiordanSpec:
    """The pair (F, G) with F(0) = 1 and G(0) = 0."""

    flavor: str
    F: TruncSeries
    G: TruncSeries

    def __post_init__(self):
        if self.flavor not in (ORDINARY, EXPONENTIAL):
            raise ValueError(f"unknown flavor {self.flavor!r}")
        if self.F[0] != 1:
            raise ValueError("F(0) must be 1")
        if self.G[0]:
            raise ValueError("G(0) must be 0")
        if self.G.order >= 1 and not self.G[1]:
            raise ValueError("G'(0) must be nonzero")

    @property
    def order(self) -> int:
        return min(self.F.order, self.G.order)

    @classmethod
    def exponential(cls, F, G) -> "RiordanSpec":
        return cls(EXPONENTIAL, _series(F), _series(G))

    @classmethod
    def ordinary(cls, f, g) -> "RiordanSpec":
        return cls(ORDINARY, _series(f), _series(g))

    def to_json(self) -> str:
        return json.dumps({"flavor": self.flavor, "F": self.F.to_strings(), "G": self.G.to_strings()})

    @classmethod
    def from_json(cls, text: str) -> "RiordanSpec":
        d = json.loads(text)
        return cls(d["flavor"], TruncSeries.from_strings(d["F"]), TruncSeries.from_strings(d["G"]))


@dataclass(frozen=True)
class AZSpec:
    """Coefficient sequences of A(s) and Z(s)."""

    flavor: str
    a: tuple
    z: tuple

    @classmethod
    def make(cls, flavor: str, a, z) -> "AZSpec":
        if flavor not in (ORDINARY, EXPONENTIAL):
            raise ValueError(f"unknown flavor {flavor!r}")
        return cls(flavor, tuple(poly(c) for c in a), tuple(poly(c) for c in z))

    @classmethod
    def from_series(cls, A: TruncSeries, Z: TruncSeries) -> "AZSpec":
        """Exponential flavor from A(s), Z(s): a_n = [s^n]A, z_n = [s^n]Z."""
        return cls.make(EXPONENTIAL, A.coeffs, Z.coeffs)


def riordan_matrix(spec: RiordanSpec, n: int) -> PolyMatrix:
    """N x N truncation; entry (n,k) = (n!/k!)[t^n] F G^k, or [t^n] f g^k."""
    if spec.order < n - 1:
        raise InsufficientOrder(f"series known to order {spec.order}, need {n - 1}")
    order = max(n - 1, 0)
    F, G = spec.F.truncate(order), spec.G.truncate(order)
    cols = []
    col = F
    for k in range(n):
        cols.append(col.coeffs)
        col = col * G
    expo = spec.flavor == EXPONENTIAL

    def entry(i, k):
        if k > i:
            return _ZERO
        c = cols[k][i]
        return c.scale(Fraction(factorial(i), factorial(k))) if expo else c

    return PolyMatrix.from_function(n, n, entry)


def riordan_product(s1: RiordanSpec, s2: RiordanSpec) -> RiordanSpec:
    """Spec of R[s1] * R[s2]: ((F2 o G1) F1, G2 o G1)."""
    if s1.flavor != s2.flavor:
        raise FlavorMismatch("cannot multiply ordinary and exponential arrays")
    order = min(s1.order, s2.order)
    F1, G1 = s1.F.truncate(order), s1.G.truncate(order)
    F2, G2 = s2.F.truncate(order), s2.G.truncate(order)
    return RiordanSpec(s1.flavor, F2.compose(G1) * F1, G2.compose(G1))


def output_matrix(p: PolyMatrix, n: int | None = None) -> PolyMatrix:
    """Rows 0..n-1 of the matrix whose row m is e_0^T P^m.

    Row m only reads rows 0..m-1 of P, so an (n-1) x n or n x n truncation
    of an infinite lower-Hessenberg P gives exact output.
    """
    n = p.cols if n is None else n
    if not p.is_lower_hessenberg():
        raise NotHessenberg("production matrix must be lower Hessenberg")
    if p.rows < n - 1 or p.cols < n:
        raise ValueError(f"need at least {n - 1} x {n} of P for {n} output rows")
    rows = [[_ONE] + [_ZERO] * (n - 1)]
    for m in range(1, n):
        prev = rows[-1]
        new = []
        for k in range(n):
            acc = _ZERO
            for i in range(max(k - 1, 0), m):
                a, b = prev[i], p.entries[i][k]
                if a and b:
                    acc = acc + a * b
            new.append(acc)
        rows.append(new)
    return PolyMatrix(rows, n)


def production_matrix(a: PolyMatrix) -> PolyMatrix:
    """P = A^{-1} Delta A, returned as the exact (N-1) x N block.

    A P = Delta A is solved by forward substitution with exact polynomial
    division, so a diagonal like phi0^n is fine as long as it divides.
    """
    n = a.rows
    if a.cols != n or n < 2:
        raise ValueError("need a square matrix of size at least 2")
    if a[0, 0] != 1:
        raise ValueError("A[0,0] must be 1")
    if not a.is_lower_triangular():
        raise ValueError("A must be lower triangular")
    delta_a = PolyMatrix([a.row(i + 1) for i in range(n - 1)], n)
    return a.block(n - 1).lower_tri_solve(delta_a)


def az_matrix(spec: AZSpec, n: int) -> PolyMatrix:
    """N x N (exponential) AZ matrix.

    Exponential: entry (i,k) = (i!/k!)(z_{i-k} + k a_{i-k+1}).
    Ordinary: column 0 is z_i, column k >= 1 is a_{i-k+1}.
    """
    a, z = spec.a, spec.z
    if len(a) < n or len(z) < n:
        raise InsufficientOrder(f"need {n} coefficients of A and Z")

    def zz(m):
        return z[m] if 0 <= m < len(z) else _ZERO

    def aa(m):
        return a[m] if 0 <= m < len(a) else _ZERO

    if spec.flavor == EXPONENTIAL:

        def entry(i, k):
            if k > i + 1:
                return _ZERO
            v = zz(i - k) + aa(i - k + 1) * k
            return v.scale(Fraction(factorial(i), factorial(k))) if v else v

    else:

        def entry(i, k):
            if k > i + 1:
                return _ZERO
            return zz(i) if k == 0 else aa(i - k + 1)

    return PolyMatrix.from_function(n, n, entry)


# series conversions

def az_from_fg(F: TruncSeries, G: TruncSeries) -> tuple[TruncSeries, TruncSeries]:
    """A(s) = G'(Gbar(s)), Z(s) = F'(Gbar(s)) / F(Gbar(s)), to order N-1."""
    order = min(F.order, G.order)
    gbar = G.truncate(order).comp_inverse()
    n1 = order - 1
    gb = gbar.truncate(n1)
    A = G.derivative().truncate(n1).compose(gb)
    Fg = F.truncate(n1).compose(gb)
    Z = F.derivative().truncate(n1).compose(gb) / Fg
    return A, Z


def fg_from_az(A: TruncSeries, Z: TruncSeries, order: int | None = None) -> tuple[TruncSeries, TruncSeries]:
    from .series import solve_fg_from_az

    order = min(A.order, Z.order) + 1 if order is None else order
    return solve_fg_from_az(A, Z, order)


def phi_psi_from_az(A: TruncSeries, Z: TruncSeries) -> tuple[TruncSeries, TruncSeries]:
    """Psi = exp(int Z/A), Phi = A / Psi."""
    order = min(A.order, Z.order)
    A, Z = A.truncate(order), Z.truncate(order)
    psi = (Z / A).integral().truncate(order).exp()
    phi = A / psi
    return phi, psi


def az_from_phi_psi(phi: TruncSeries, psi: TruncSeries) -> tuple[TruncSeries, TruncSeries]:
    """A = Phi Psi, Z = Phi Psi'."""
    order = min(phi.order, psi.order)
    dpsi = psi.derivative()
    return phi.truncate(order) * psi.truncate(order), phi.truncate(order - 1) * dpsi.truncate(order - 1)


_CONVERSIONS = {
    "az_from_fg": az_from_fg,
    "fg_from_az": fg_from_az,
    "phi_psi_from_az": phi_psi_from_az,
    "az_from_phi_psi": az_from_phi_psi,
}


def spec_conversions(kind: str, first: TruncSeries, second: TruncSeries):
    if kind not in _CONVERSIONS:
        raise ValueError(f"unknown conversion {kind!r}")
    return _CONVERSIONS[kind](first, second)


def eaz_phi_psi_factorization(phi: Sequence, psi: Sequence, xi, n: int) -> PolyMatrix:
    """T(phi)^# (Delta + xi I) T(psi)^#, exact N x N block.

    The factors are built at size N+1 since Delta reaches one column right.
    """
    if len(phi) < n + 1 or len(psi) < n + 1:
        raise InsufficientOrder(f"need {n + 1} terms of each sequence")
    m = n + 1
    left = sharp_scale(toeplitz(phi, m))
    right = sharp_scale(toeplitz(psi, m))
    mid = shift_delta(m) + identity(m).scale(poly(xi))
    return (left @ mid @ right).block(n)


def rowgen_matrix(a: PolyMatrix, x=None) -> PolyMatrix:
    """A B_x; column 0 holds the row-generating polynomials."""
    from .polyring import X

    x = X if x is None else x
    return a @ binomial(x, 1, a.rows)


def zeroth_first_test(m: PolyMatrix, c) -> bool:
    """Is column 0 equal to c times column 1?

    Lower-triangular M (a Riordan array): checked for rows n >= 1.
    Otherwise M is read as a production matrix: checked on every row, and
    M = M Delta^T (c e00 + Delta) is verified on the block where both sides
    are known.
    """
    c = poly(c)
    if m.cols < 2:
        raise ValueError("need at least two columns")
    if m.is_lower_triangular():
        return all(m[i, 0] == c * m[i, 1] for i in range(1, m.rows))
    if not m.is_lower_hessenberg():
        raise NotHessenberg("matrix is neither lower triangular nor lower Hessenberg")
    if not all(m[i, 0] == c * m[i, 1] for i in range(m.rows)):
        return False
    k = m.cols
    drop_first = PolyMatrix.from_function(m.rows, k, lambda i, j: m[i, j + 1] if j + 1 < k else _ZERO)
    right = shift_delta(k) + PolyMatrix.from_function(k, k, lambda i, j: c if i == j == 0 else 0)
    prod = drop_first @ right
    return all(prod[i, j] == m[i, j] for i in range(m.rows) for j in range(k - 1))


def hankel_of_output(p: PolyMatrix, n: int) -> tuple[PolyMatrix, PolyMatrix]:
    """Both sides of H((P^m)_{00}) = O(P) O(P^T)^T on the n x n block.

    P must be at least (2n-1) x (2n-1) so every entry used is exact.
    """
    from .linalg import hankel

    size = 2 * n - 1
    if p.rows < size or p.cols < size:
        raise ValueError(f"need P of size at least {size}")
    p = p.block(size)
    o = output_matrix(p, size)
    seq = [o[m, 0] for m in range(size)]
    left = hankel(seq, n)
    # O(P^T) is not triangular; row m is e_0^T (P^T)^m over all columns
    pt = p.transpose()
    rows = [[_ONE] + [_ZERO] * (size - 1)]
    for _ in range(1, n):
        prev = rows[-1]
        rows.append([sum((prev[i] * pt[i, k] for i in range(size) if prev[i] and pt[i, k]), _ZERO)
                     for k in range(size)])
    o_t = PolyMatrix(rows, size)
    right = o.block(n, size) @ o_t.transpose()
    return left, right
