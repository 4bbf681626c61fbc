"""The tree matrices T, T(y,z), T(y,phi), their row polynomials and production matrices."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

from .linalg import (
    PolyMatrix,
    binomial,
    check_tp_order,
    identity,
    power_toeplitz,
    sharp_scale,
    shift_delta,
    toeplitz,
)
from .polyring import X, Y, Z, Polynomial, phi, poly
from .riordan import RiordanSpec, output_matrix, production_matrix, riordan_matrix, spec_conversions
from .series import TruncSeries, exp_series, geometric, solve_fg_from_az, tree_function
from .trees import count_by_vertex1_children, tree_polynomial

__all__ = [
    "CapExceeded",
    "ROUTES",
    "CAPS",
    "matrix_T",
    "matrix_T_yz",
    "matrix_T_yphi",
    "phi_sequence",
    "dumont_series",
    "functional_equation_residual",
    "ordered_subset",
    "prodmat_explicit",
    "prodmat_entry",
    "pnk_recurrence_check",
    "qk_polynomial",
    "qk_identity_check",
    "q_matrix",
    "q_conjecture_matrix",
    "q_conjecture_check",
    "QConjectureReport",
    "row_polynomial",
    "egf_abel_check",
    "expected_series",
    "series_tower_check",
    "psi_from_matrix_series",
]

_ZERO = Polynomial.constant(0)
_ONE = Polynomial.constant(1)

ROUTES = ("closed-formula", "riordan-ode", "brute-force")

# largest N (number of rows) per (matrix, route)
CAPS = {
    ("T", "closed-formula"): 60,
    ("T", "riordan-ode"): 30,
    ("T", "brute-force"): 9,
    ("Tyz", "closed-formula"): 16,
    ("Tyz", "riordan-ode"): 16,
    ("Tyz", "brute-force"): 7,
    ("Typhi", "closed-formula"): 9,
    ("Typhi", "riordan-ode"): 9,
    ("Typhi", "brute-force"): 6,
}


class CapExceeded(ValueError):
    pass


def _cap(which: str, route: str, n: int):
    if route not in ROUTES:
        raise ValueError(f"unknown route {route!r}; choose from {', '.join(ROUTES)}")
    cap = CAPS[(which, route)]
    if n > cap:
        raise CapExceeded(f"{which} via {route} is capped at N = {cap}")


def phi_sequence(n: int) -> list:
    """Symbolic phi_0, ..., phi_{n-1}."""
    return [poly(phi(m)) for m in range(n)]


def _rows_from_polys(n: int, entry) -> PolyMatrix:
    return PolyMatrix.from_function(n, n, lambda i, k: entry(i, k) if k <= i else _ZERO)


def dumont_series(phi_coeffs, y, order: int) -> TruncSeries:
    """R(t) with R' = Phi(R) / (1 - y R), R(0) = 0, to order ``order``."""
    a = TruncSeries(phi_coeffs, order) * geometric(y, order)
    _, g = solve_fg_from_az(a, TruncSeries([0], order), order)
    return g


def _riordan_from_phi(phi_coeffs, y, n: int) -> PolyMatrix:
    order = max(n - 1, 1)
    r = dumont_series(phi_coeffs, y, order)
    f = (TruncSeries([1], order) - r * poly(y)).reciprocal()
    return riordan_matrix(RiordanSpec.exponential(f, r), n)


def matrix_T(n: int, route: str = "closed-formula") -> PolyMatrix:
    """N x N matrix with entries C(i,k) i^(i-k), 0^0 = 1."""
    _cap("T", route, n)
    if route == "closed-formula":
        return _rows_from_polys(n, lambda i, k: comb(i, k) * i ** (i - k))
    if route == "riordan-ode":
        order = max(n - 1, 1)
        a = exp_series(1, order) * geometric(1, order)
        zser = a * geometric(1, order)
        f, g = solve_fg_from_az(a, zser, order)
        return riordan_matrix(RiordanSpec.exponential(f, g), n)
    rows = [count_by_vertex1_children(i + 1) for i in range(n)]
    return _rows_from_polys(n, lambda i, k: rows[i][k])


def matrix_T_yz(n: int, route: str = "closed-formula") -> PolyMatrix:
    """Entries t_{n,k}(y,z).

    closed-formula: output matrix of B_z Delta T_y^#.
    riordan-ode: R[1/(1 - yR), R] with R' = e^{zR}/(1 - yR).
    brute-force: sum over trees on n+1 vertices.
    """
    _cap("Tyz", route, n)
    if route == "closed-formula":
        return output_matrix(prodmat_explicit("T_yz", n))
    if route == "riordan-ode":
        order = max(n - 1, 1)
        return _riordan_from_phi(exp_series(Z, order).coeffs, Y, n)
    return _rows_from_polys(n, lambda i, k: tree_polynomial(i, k, "yz", cap=n))


def matrix_T_yphi(n: int, route: str = "closed-formula") -> PolyMatrix:
    """Entries t_{n,k}(y, phi) with symbolic phi_0, phi_1, ..."""
    _cap("Typhi", route, n)
    if route == "closed-formula":
        return output_matrix(prodmat_explicit("T_yphi", n))
    if route == "riordan-ode":
        return _riordan_from_phi(phi_sequence(max(n, 2)), Y, n)
    return _rows_from_polys(n, lambda i, k: tree_polynomial(i, k, "yphi", cap=n))


def functional_equation_residual(order: int) -> TruncSeries:
    """(y - z + yzR) - (y - z + z^2 t) e^{zR} for R = R(t; y, z); zero when it holds."""
    r = dumont_series(exp_series(Z, order).coeffs, Y, order)
    t = TruncSeries.t(order)
    yz = poly(Y) - poly(Z)
    lhs = r * (poly(Y) * poly(Z)) + yz
    ez = (r * poly(Z)).exp()
    rhs = (t * (poly(Z) ** 2) + yz) * ez
    return lhs - rhs


def egf_abel_check(n_max: int) -> list:
    """Indices n <= n_max where n! [t^n] e^{xT}/(1-T) differs from (x+n)^n."""
    order = n_max
    tt = tree_function(order)
    series = (tt * poly(X)).exp() * (TruncSeries([1], order) - tt).reciprocal()
    bad = []
    for m, c in enumerate(series.egf_numbers()):
        if c != (poly(X) + m) ** m:
            bad.append(m)
    return bad


def _fg(which: str, order: int):
    if which == "T":
        a = exp_series(1, order) * geometric(1, order)
        return solve_fg_from_az(a, a * geometric(1, order), order)
    if which == "T_yz":
        coeffs = exp_series(Z, order).coeffs
    elif which == "T_yphi":
        coeffs = phi_sequence(order + 1)
    else:
        raise ValueError(f"unknown matrix {which!r}")
    r = dumont_series(coeffs, Y, order)
    return (TruncSeries([1], order) - r * poly(Y)).reciprocal(), r


def expected_series(which: str, order: int) -> dict:
    """Closed forms of A, Z, Phi, Psi for T, T(y,z), T(y,phi)."""
    if which == "T":
        phi_s, psi = exp_series(1, order), geometric(1, order)
    elif which == "T_yz":
        phi_s, psi = exp_series(Z, order), geometric(Y, order)
    elif which == "T_yphi":
        phi_s, psi = TruncSeries(phi_sequence(order + 1), order), geometric(Y, order)
    else:
        raise ValueError(f"unknown matrix {which!r}")
    return {"A": phi_s * psi, "Z": phi_s * psi.derivative(), "Phi": phi_s, "Psi": psi}


def psi_from_matrix_series(which: str, order: int) -> TruncSeries:
    """Psi recovered from (F, G) of T or T(y,z) through A, Z."""
    if which not in ("T", "T_yz"):
        raise ValueError("Psi by conversion needs G'(0) = 1")
    f, g = _fg(which, order + 1)
    a, zs = spec_conversions("az_from_fg", f, g)
    return spec_conversions("phi_psi_from_az", a, zs)[1]


def series_tower_check(which: str, order: int) -> list:
    """Names of the series among A, Z, Phi, Psi that disagree with their closed forms.

    For T and T(y,z) the series are recovered from (F,G) by spec_conversions.
    For T(y,phi), G'(0) = phi_0 is not a unit, so each defining relation is
    checked by substitution instead: A(G) = G', F Z(G) = F', Psi(G) = F, A = Phi Psi.
    """
    f, g = _fg(which, order + 1)
    exp = expected_series(which, order)
    bad = []
    if which != "T_yphi":
        a, zs = spec_conversions("az_from_fg", f, g)
        phi_s, psi = spec_conversions("phi_psi_from_az", a, zs)
        got = {"A": a, "Z": zs, "Phi": phi_s, "Psi": psi}
        for name in ("A", "Z", "Phi", "Psi"):
            m = min(got[name].order, order - 1)
            if not got[name].agrees_with(exp[name], m):
                bad.append(name)
        return bad
    m = order
    gm, fm = g.truncate(m), f.truncate(m)
    checks = {
        "A": exp["A"].truncate(m).compose(gm).agrees_with(g.derivative(), m - 1),
        "Z": (f.truncate(m - 1) * exp["Z"].compose(g.truncate(m - 1))).agrees_with(f.derivative(), m - 1),
        "Psi": exp["Psi"].truncate(m).compose(gm).agrees_with(fm, m),
        "Phi": (exp["Phi"] * exp["Psi"]).agrees_with(exp["A"], m),
    }
    return [name for name, ok in checks.items() if not ok]


# production matrices

def ordered_subset(m: int) -> int:
    """S_m = sum_{k<=m} m!/k!."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    return sum(factorial(m) // factorial(k) for k in range(m + 1))


def prodmat_entry(n: int, k: int) -> int:
    """p_{n,k} = n C(n,k) S_{n-k} + C(n+1,k) for the production matrix of T."""
    if k > n + 1:
        return 0
    s = ordered_subset(n - k) if k <= n else 0
    return n * comb(n, k) * s + comb(n + 1, k)


def _factors(which: str, m: int, xi=None):
    if which == "T":
        left, right = binomial(1, 1, m), sharp_scale(power_toeplitz(1, m))
    elif which == "T_yz":
        left, right = binomial(Z, 1, m), sharp_scale(power_toeplitz(Y, m))
    elif which == "T_yphi":
        left, right = sharp_scale(toeplitz(phi_sequence(m), m)), sharp_scale(power_toeplitz(Y, m))
    else:
        raise ValueError(f"unknown matrix {which!r}")
    mid = shift_delta(m)
    if xi is not None:
        mid = mid + identity(m).scale(poly(xi))
    return left, mid, right


def prodmat_explicit(which: str, n: int, form: str = "factorized", xi=None) -> PolyMatrix:
    """N x N block of the production matrix.

    factorized: left Delta right, with left/right from {B_1, T_1^#},
    {B_z, T_y^#} or {T(phi)^#, T_y^#}; with ``xi`` the middle is Delta + xi I
    (the B_xi-conjugated matrix).
    entrywise: the ordered-subset formula (T only).
    """
    if form == "entrywise":
        if which != "T" or xi is not None:
            raise ValueError("the entrywise formula covers T only")
        return PolyMatrix.from_function(n, n, prodmat_entry)
    if form != "factorized":
        raise ValueError(f"unknown form {form!r}")
    left, mid, right = _factors(which, n + 1, xi)
    return (left @ mid @ right).block(n)


def pnk_recurrence_check(n: int) -> list:
    """Entries of T's production matrix (N x N) breaking p_{n,k} = (k+1)p_{n,k+1} + C(n,k-1)."""
    p = production_matrix(matrix_T(n + 2)).block(n + 1, n + 2)
    bad = []
    for i in range(n):
        if p[i, i + 1] != 1:
            bad.append((i, i + 1))
        for k in range(i + 1):
            rhs = p[i, k + 1] * (k + 1) + (comb(i, k - 1) if k >= 1 else 0)
            if p[i, k] != rhs:
                bad.append((i, k))
    return bad


def _binom_poly(j: int) -> Polynomial:
    """C(x, j) as a polynomial in x."""
    acc = _ONE
    for i in range(j):
        acc = acc * (poly(X) - i)
    return acc.scale(Fraction(1, factorial(j)))


def qk_polynomial(k: int) -> Polynomial:
    """Q_k as a polynomial in x (standing for n): -1 + sum_{j=2}^k (j-1)! C(x, j-2)."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    acc = Polynomial.constant(-1)
    for j in range(2, k + 1):
        acc = acc + _binom_poly(j - 2) * factorial(j - 1)
    return acc


def qk_identity_check(n_max: int, k_max: int) -> list:
    """Pairs (n,k) where p_{n,k} k! != n S_n - Q_k(n)."""
    bad = []
    for k in range(k_max + 1):
        q = qk_polynomial(k)
        for m in range(n_max + 1):
            lhs = prodmat_entry(m, k) * factorial(k)
            rhs = m * ordered_subset(m) - q.substitute({X: m}).constant_value()
            if lhs != rhs:
                bad.append((m, k))
    return bad


def q_matrix(n: int) -> PolyMatrix:
    """N x N block of Q = Pt^{-1} Delta Pt where Pt is P with column 0 removed."""
    m = n + 1
    p = prodmat_explicit("T", m, form="entrywise")
    pt = PolyMatrix.from_function(m, m, lambda i, j: p[i, j + 1] if j + 1 < m else prodmat_entry(i, j + 1))
    return production_matrix(pt).block(n)


def q_conjecture_matrix(n: int) -> PolyMatrix:
    def entry(i, k):
        if k < i:
            return factorial(i + 1) // factorial(k + 1)
        if k == i:
            return 3 if i == 0 else 2
        if k == i + 1:
            return 1
        return 0

    return PolyMatrix.from_function(n, n, entry)


@dataclass
class QConjectureReport:
    n: int
    consistent: bool
    mismatches: list
    tp2_witness: object
    tp2_witness_value: int

    @property
    def status(self) -> str:
        return "conjecture-consistent" if self.consistent else "conjecture-violated"


def q_conjecture_check(n: int) -> QConjectureReport:
    if n > 8:
        raise CapExceeded("the Q check is capped at N = 8")
    q = q_matrix(n)
    conj = q_conjecture_matrix(n)
    mism = [(i, j) for i in range(n) for j in range(n) if q[i, j] != conj[i, j]]
    v = check_tp_order(q.block(min(n, 3)), 2)
    val = (q[1, 0] * q[2, 1] - q[1, 1] * q[2, 0]).constant_value() if n >= 3 else None
    return QConjectureReport(n, not mism, mism, v.witness, val)


def row_polynomial(n: int, mode: str = "x", route: str = "closed-formula") -> Polynomial:
    """sum_k t_{n,k}(.) x^k; in mode x this is (x+n)^n."""
    if mode == "x":
        m = matrix_T(n + 1, route)
    elif mode == "xyz":
        m = matrix_T_yz(n + 1, route)
    elif mode == "xyphi":
        m = matrix_T_yphi(n + 1, route)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    acc = _ZERO
    for k in range(n + 1):
        if m[n, k]:
            acc = acc + m[n, k] * poly(X) ** k
    return acc
