from fractions import Fraction
from math import factorial

import pytest
import sympy as sp

from treetp.linalg import check_tp_order
from treetp.riordan import production_matrix
from treetp.polyring import X, Y, Z, parse, phi, poly
from treetp.treematrices import (
    CapExceeded,
    egf_abel_check,
    functional_equation_residual,
    matrix_T,
    matrix_T_yphi,
    matrix_T_yz,
    ordered_subset,
    pnk_recurrence_check,
    prodmat_entry,
    prodmat_explicit,
    q_conjecture_check,
    qk_identity_check,
    qk_polynomial,
    row_polynomial,
    series_tower_check,
)

PROD_ROWS = [
    [1, 1],
    [3, 3, 1],
    [11, 11, 5, 1],
    [49, 49, 24, 7, 1],
    [261, 261, 130, 42, 9, 1],
    [1631, 1631, 815, 270, 65, 11, 1],
    [11743, 11743, 5871, 1955, 485, 93, 13, 1],
    [95901, 95901, 47950, 15981, 3990, 791, 126, 15],
]


def rows_of(m, n):
    return [[str(m[i, k]) for k in range(i + 1)] for i in range(n)]


def test_matrix_T_examples():
    m = matrix_T(5)
    assert list(m.row(4)) == [256, 256, 96, 16, 1]
    assert sum(m.row(4)) == 625
    assert matrix_T(5, "riordan-ode").row(4) == m.row(4)
    for i in range(5):
        assert m[i, i] == 1
        for k in range(i + 1, 5):
            assert m[i, k] == 0


def test_matrix_T_against_sympy_binomial():
    m = matrix_T(12)
    for i in range(12):
        for k in range(i + 1):
            assert m[i, k] == sp.binomial(i, k) * sp.Integer(i) ** (i - k)


def test_matrix_T_yz_examples():
    m = matrix_T_yz(4)
    assert m[2, 0] == parse("y*z + 3*y^2")
    row3 = [m[3, k].substitute({Z: 1}) for k in range(4)]
    assert row3 == [parse("2*y + 10*y^2 + 15*y^3"), parse("2 + 10*y + 15*y^2"), parse("3 + 6*y"), 1]
    assert m.substitute({Y: 1, Z: 1}) == matrix_T(4)


def test_matrix_T_yphi_diagonal_and_collapse():
    m = matrix_T_yphi(5)
    for i in range(5):
        assert m[i, i] == poly(phi(0)) ** i
    spec = {phi(j): Fraction(1, factorial(j)) for j in range(6)}
    assert m.substitute({**spec, Y: 1}) == matrix_T(5)


@pytest.mark.parametrize("route", ["closed-formula", "riordan-ode", "brute-force"])
def test_routes_match_frozen_rows(route, frozen):
    assert rows_of(matrix_T_yz(6, route), 6) == frozen["Tyz_rows"]
    assert rows_of(matrix_T_yphi(5, route), 5) == frozen["Typhi_rows"]


def test_routes_agree_on_T():
    ref = matrix_T(8)
    for route in ("riordan-ode", "brute-force"):
        assert matrix_T(8, route) == ref


def test_caps():
    with pytest.raises(CapExceeded):
        matrix_T(10, "brute-force")
    with pytest.raises(CapExceeded):
        matrix_T_yz(8, "brute-force")
    with pytest.raises(CapExceeded):
        matrix_T_yphi(7, "brute-force")
    with pytest.raises(ValueError):
        matrix_T(3, "guess")


def test_ordered_subset_numbers():
    assert [ordered_subset(m) for m in (0, 3, 4)] == [1, 16, 65]
    for m in range(1, 12):
        assert ordered_subset(m) == m * ordered_subset(m - 1) + 1
    for n in range(10):
        assert prodmat_entry(n, 0) == prodmat_entry(n, 1) == n * ordered_subset(n) + 1


def test_production_matrix_table():
    p = prodmat_explicit("T", 8)
    for i, row in enumerate(PROD_ROWS):
        assert [p[i, k] for k in range(len(row))] == row
    assert p == prodmat_explicit("T", 8, form="entrywise")


def test_production_matrix_equals_computed():
    assert production_matrix(matrix_T(10)).block(9) == prodmat_explicit("T", 9)
    assert production_matrix(matrix_T_yz(7)).block(6) == prodmat_explicit("T_yz", 6)
    assert production_matrix(matrix_T_yphi(6)).block(5) == prodmat_explicit("T_yphi", 5)


@pytest.mark.parametrize("which", ["T_yz", "T_yphi"])
def test_zeroth_column_is_y_times_first(which):
    p = prodmat_explicit(which, 7)
    for i in range(7):
        assert p[i, 0] == poly(Y) * p[i, 1]


def test_backward_recurrence_and_qk():
    assert pnk_recurrence_check(10) == []
    assert qk_identity_check(10, 8) == []
    assert qk_polynomial(0) == qk_polynomial(1) == -1
    assert qk_polynomial(3) == 2 * poly(X)
    assert qk_polynomial(5) == parse("4*x^3 - 9*x^2 + 7*x")
    for k in range(3, 9):
        q = qk_polynomial(k)
        assert q.degree(X) == k - 2
        assert q.coefficient(X, k - 2) == k - 1


def test_q_conjecture():
    rep = q_conjecture_check(7)
    assert rep.consistent and rep.status == "conjecture-consistent"
    assert rep.tp2_witness_value == -6
    assert rep.tp2_witness is not None
    assert q_conjecture_check(4).mismatches == []
    with pytest.raises(CapExceeded):
        q_conjecture_check(9)


def test_row_polynomials():
    assert row_polynomial(3) == parse("x^3 + 9*x^2 + 27*x + 27")
    assert row_polynomial(2, "xyz") == parse("x^2 + (z + 3*y)*x + y*z + 3*y^2")
    for mode in ("x", "xyz", "xyphi"):
        assert row_polynomial(0, mode) == 1
    for n in range(6):
        p = row_polynomial(n, "xyz")
        assert all(sum(e) == n for e in p.terms)
        assert p.substitute({Y: 1, Z: 1}) == (poly(X) + n) ** n


def test_series_identities():
    assert all(c.is_zero() for c in functional_equation_residual(8))
    assert egf_abel_check(8) == []
    for which in ("T", "T_yz", "T_yphi"):
        assert series_tower_check(which, 7) == []


def test_egf_identity_against_sympy():
    t, x = sp.symbols("t x")
    tree = -sp.LambertW(-t)
    s = sp.series(sp.exp(x * tree) / (1 - tree), t, 0, 6).removeO()
    for n in range(6):
        want = sp.Poly(sp.expand(sp.factorial(n) * s.coeff(t, n)), x).all_coeffs()[::-1]
        got = row_polynomial(n)
        assert [got.coefficient(X, j) for j in range(n + 1)] == want


def test_T_is_totally_positive_small():
    assert check_tp_order(matrix_T(6), 6).outcome == "pass"
