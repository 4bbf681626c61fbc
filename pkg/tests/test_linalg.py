from fractions import Fraction
from math import comb

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from strategies import nonneg_polys, polynomials
from treetp.linalg import (
    BadIndexSet,
    NonInvertibleDiagonal,
    NotLowerTriangular,
    PolyMatrix,
    aswe_sequence,
    binomial,
    build_structured,
    check_tp_order,
    count_minors,
    det_bareiss,
    det_laplace,
    first_negative_minor,
    hankel,
    identity,
    minor_det,
    power_toeplitz,
    sharp_scale,
    shift_delta,
    toeplitz,
)
from treetp.polyring import X, XI, Y, Z, parse, poly
from treetp.riordan import AZSpec, az_matrix
from treetp.treematrices import matrix_T


def test_power_toeplitz():
    assert power_toeplitz(X, 3) == PolyMatrix([[1, 0, 0], ["x", 1, 0], ["x^2", "x", 1]])


def test_binomial_row_four():
    assert [binomial(1, 1, 5)[4, j] for j in range(5)] == [1, 4, 6, 4, 1]


def test_hankel_entry():
    seq = [(n + 1) ** n for n in range(7)]
    assert hankel(seq, 4)[1, 2] == 64
    with pytest.raises(ValueError):
        hankel(seq[:3], 4)


def test_build_structured_dispatch():
    assert build_structured("shift_delta", 3) == shift_delta(3)
    assert build_structured("diag_factorial", 4)[3, 3] == 6
    with pytest.raises(ValueError):
        build_structured("nope", 3)


def test_lower_tri_inverse_of_binomial():
    b = binomial(X, 1, 6)
    assert b.lower_tri_inverse() @ b == identity(6)
    assert b.lower_tri_inverse() == binomial(-poly(X), 1, 6)


def test_abel_inverse_of_T():
    inv = matrix_T(7).lower_tri_inverse()
    for n in range(7):
        for k in range(n + 1):
            want = 1 if n == k else (-1) ** (n - k) * comb(n, k) * n * k ** (n - k - 1)
            assert inv[n, k] == want, (n, k)


def test_non_invertible_diagonal():
    with pytest.raises(NonInvertibleDiagonal):
        PolyMatrix([[parse("y"), 0], [1, 1]]).lower_tri_inverse()


def test_conjugate_eaz_by_binomial():
    a = [poly(1), parse("x"), parse("y"), parse("z"), 0, 0, 0, 0]
    z = [parse("y"), parse("x + 1"), parse("z^2"), 0, 0, 0, 0, 0]
    eaz = az_matrix(AZSpec.make("exponential", a, z), 7)
    left = eaz.conjugate_by(binomial(XI, 1, 7)).block(6)
    right = az_matrix(AZSpec.make("exponential", a, [zi + ai * poly(XI) for ai, zi in zip(a, z)]), 6)
    assert left == right


def test_sharp_scale():
    ones = PolyMatrix.from_function(4, 4, lambda i, j: 1 if j <= i else 0)
    assert sharp_scale(ones)[3, 1] == 6
    assert sharp_scale(ones, [1, 1, 1, 1]) == ones
    with pytest.raises(NotLowerTriangular):
        sharp_scale(shift_delta(3))


def test_sharp_factorization_row_three():
    phi = [Fraction(1, 1), 1, Fraction(1, 2), Fraction(1, 6), Fraction(1, 24), Fraction(1, 120)]
    p = sharp_scale(toeplitz(phi, 5)) @ shift_delta(5) @ sharp_scale(power_toeplitz(1, 5))
    assert [p[3, j] for j in range(5)] == [49, 49, 24, 7, 1]


def test_minor_examples():
    assert minor_det(power_toeplitz(X, 3), (1, 2), (0, 1)) == 0
    assert minor_det(binomial(1, 1, 4), (0, 1, 2), (0, 1, 2)) == 1
    seq = [sum((poly(X) ** k for k in range(n + 1)), poly(0)) for n in range(3)]
    assert minor_det(hankel(seq, 2), (0, 1), (0, 1)) == -poly(X)
    with pytest.raises(BadIndexSet):
        minor_det(identity(3), (0, 0), (1, 2))
    with pytest.raises(BadIndexSet):
        minor_det(identity(3), (0,), (1, 2))


def test_check_tp_order_examples():
    v = check_tp_order(matrix_T(8), 8)
    assert v.ok and v.minors_checked == comb(16, 8) - 1
    seq = [sum((poly(X) ** k for k in range(n + 1)), poly(0)) for n in range(3)]
    v = check_tp_order(hankel(seq, 2), 2)
    assert not v.ok and v.witness[2] == -poly(X)
    bidiag = PolyMatrix.from_function(5, 5, lambda i, j: parse("x") if i == j else parse("y + z") if i == j + 1 else 0)
    assert check_tp_order(bidiag, 5).ok


def test_budget_gives_inconclusive():
    v = check_tp_order(matrix_T(6), 6, budget=10)
    assert v.inconclusive and v.outcome == "inconclusive" and v.minors_checked == 0
    assert count_minors(6, 6, 6) == comb(12, 6) - 1


def test_budget_environment_override(monkeypatch):
    monkeypatch.setenv("TREETP_MINOR_BUDGET", "17")
    assert check_tp_order(matrix_T(6), 6).outcome == "inconclusive"
    assert check_tp_order(matrix_T(2), 2).outcome == "pass"
    monkeypatch.delenv("TREETP_MINOR_BUDGET")
    assert check_tp_order(matrix_T(6), 6).outcome == "pass"


def test_first_negative_minor():
    seq = [1, -1, Fraction(1, 2), Fraction(-1, 6), Fraction(1, 24)]
    rows, cols, d = first_negative_minor(toeplitz(seq, 5), 2)
    assert len(rows) == 2 and not d.is_nonneg()
    assert first_negative_minor(binomial(1, 1, 5), 2) is None


def test_aswe_examples():
    assert aswe_sequence(1, None, [], [1], 5) == [1] * 5
    assert aswe_sequence(1, 1, [], [], 4) == [1, 1, Fraction(1, 2), Fraction(1, 6)]
    got = aswe_sequence(1, Z, [], [Y], 4)
    for n in range(4):
        want = sum((poly(Z) ** j * poly(Y) ** (n - j)).scale(Fraction(1, sympy.factorial(j))) for j in range(n + 1))
        assert got[n] == want


def test_serialization_round_trips():
    m = matrix_T(4).map(lambda e: e * parse("y + 1/2"))
    assert PolyMatrix.from_json(m.to_json()) == m
    assert m.to_csv().splitlines()[2] == "4*y + 2,4*y + 2,y + 1/2,0"


small_matrices = st.integers(1, 4).flatmap(
    lambda n: st.lists(st.lists(polynomials(max_terms=2, max_exp=2), min_size=n, max_size=n), min_size=n, max_size=n))


@given(small_matrices)
def test_bareiss_matches_laplace_and_sympy(rows):
    lap = det_laplace(rows)
    assert det_bareiss(rows) == lap
    sm = sympy.Matrix([[sympy.sympify(str(e)) for e in r] for r in rows])
    assert sympy.expand(sm.det() - sympy.sympify(str(lap))) == 0


@given(st.lists(st.lists(st.integers(-9, 9), min_size=4, max_size=4), min_size=4, max_size=4))
def test_integer_fast_path(rows):
    assert det_bareiss([[poly(v) for v in r] for r in rows]) == int(sympy.Matrix(rows).det())


@given(st.lists(nonneg_polys, min_size=5, max_size=5), st.lists(nonneg_polys, min_size=4, max_size=4))
def test_bidiagonal_with_nonneg_entries_is_tp(diag, sub):
    m = PolyMatrix.from_function(5, 5, lambda i, j: diag[i] if i == j else sub[j] if i == j + 1 else 0)
    assert check_tp_order(m, 3).ok


@given(st.integers(1, 5), st.integers(1, 3))
def test_product_of_tp_matrices_is_tp(n, r):
    a = binomial(X, Y, n) @ power_toeplitz(Z, n)
    assert check_tp_order(a, r).ok


@given(small_matrices)
def test_transpose_and_product(rows):
    n = len(rows)
    m = PolyMatrix(rows, n)
    assert (m @ identity(n)) == m
    assert m.T.T == m
    assert (m @ m).T == m.T @ m.T
