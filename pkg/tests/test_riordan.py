from fractions import Fraction
from math import factorial

import pytest
from hypothesis import given
from hypothesis import strategies as st

from treetp.linalg import PolyMatrix, binomial, check_tp_order, identity, shift_delta
from treetp.polyring import X, XI, Y, phi, poly
from treetp.riordan import (
    AZSpec,
    FlavorMismatch,
    InsufficientOrder,
    NotHessenberg,
    RiordanSpec,
    az_from_fg,
    az_matrix,
    eaz_phi_psi_factorization,
    hankel_of_output,
    output_matrix,
    phi_psi_from_az,
    production_matrix,
    riordan_matrix,
    riordan_product,
    rowgen_matrix,
    spec_conversions,
    zeroth_first_test,
)
from treetp.series import TruncSeries, exp_series, geometric, tree_function
from treetp.treematrices import matrix_T, matrix_T_yz, ordered_subset, prodmat_explicit

N = 6
T_SPEC = RiordanSpec.exponential(
    TruncSeries([Fraction(n ** n, factorial(n)) for n in range(N + 2)]), tree_function(N + 1))
PROD_TABLE = [
    [1, 1],
    [3, 3, 1],
    [11, 11, 5, 1],
    [49, 49, 24, 7, 1],
    [261, 261, 130, 42, 9, 1],
    [1631, 1631, 815, 270, 65, 11, 1],
    [11743, 11743, 5871, 1955, 485, 93, 13, 1],
    [95901, 95901, 47950, 15981, 3990, 791, 126, 15],
]

rationals = st.fractions(min_value=-3, max_value=3, max_denominator=4)


def test_binomial_as_riordan():
    spec = RiordanSpec.exponential(exp_series(XI, N), TruncSeries.t(N))
    assert riordan_matrix(spec, N) == binomial(XI, 1, N)


def test_T_entry():
    assert riordan_matrix(T_SPEC, 5)[4, 2] == 96


def test_ordinary_identity():
    assert riordan_matrix(RiordanSpec.ordinary(TruncSeries([1], 4), TruncSeries.t(4)), 5) == identity(5)


def test_spec_validation():
    with pytest.raises(ValueError):
        RiordanSpec.exponential([2], TruncSeries.t(3))
    with pytest.raises(ValueError):
        RiordanSpec.exponential([1], [1, 1])
    with pytest.raises(ValueError):
        RiordanSpec.exponential([1], [0, 0, 1])
    with pytest.raises(InsufficientOrder):
        riordan_matrix(RiordanSpec.exponential([1, 1], [0, 1]), 5)


def test_spec_json_round_trip():
    assert RiordanSpec.from_json(T_SPEC.to_json()) == T_SPEC


def test_products_with_binomial():
    bx = RiordanSpec.exponential(exp_series(XI, N), TruncSeries.t(N))
    right = riordan_product(T_SPEC, bx)
    assert right.F == exp_series(XI, N).compose(T_SPEC.G.truncate(N)) * T_SPEC.F.truncate(N)
    left = riordan_product(bx, T_SPEC)
    assert left.F == exp_series(XI, N) * T_SPEC.F.truncate(N)
    assert riordan_matrix(left, N) == binomial(XI, 1, N) @ riordan_matrix(T_SPEC, N)
    ident = RiordanSpec.exponential(TruncSeries([1], N), TruncSeries.t(N))
    assert riordan_product(ident, T_SPEC).G == T_SPEC.G.truncate(N)
    with pytest.raises(FlavorMismatch):
        riordan_product(ident, RiordanSpec.ordinary([1], TruncSeries.t(N)))


def test_output_examples():
    assert output_matrix(identity(5).scale(poly(X)) + shift_delta(5)) == binomial(X, 1, 5)
    e = PolyMatrix.from_function(5, 5, lambda i, j: poly(X) if i == j == 0 else 1 if j == i + 1 else 0)
    out = output_matrix(e)
    assert all(out[n, k] == poly(X) ** (n - k) for n in range(5) for k in range(n + 1))
    assert output_matrix(prodmat_explicit("T", 5)) == matrix_T(5)
    with pytest.raises(NotHessenberg):
        output_matrix(PolyMatrix.from_function(3, 3, lambda i, j: 1))


def test_production_examples():
    b = production_matrix(binomial(1, 1, 6))
    assert b == (identity(6) + shift_delta(6)).block(5, 6)
    assert production_matrix(identity(5)) == shift_delta(4, 5)
    p = production_matrix(matrix_T(9))
    assert p.shape == (8, 9)
    for n, row in enumerate(PROD_TABLE):
        assert [p[n, k] for k in range(len(row))] == row


def test_eaz_examples():
    assert az_matrix(AZSpec.make("exponential", [1, 0, 0, 0, 0], [0] * 5), 5) == shift_delta(5)
    a = [Fraction(ordered_subset(n), factorial(n)) for n in range(5)]
    z = [Fraction(n * ordered_subset(n) + 1, factorial(n)) for n in range(5)]
    assert az_matrix(AZSpec.make("exponential", a, z), 5).row(2)[:4] == (11, 11, 5, 1)


@pytest.mark.parametrize("lam,mu", [(1, 1), (2, 3), (0, 1)])
def test_converse_example_tridiagonal(lam, mu):
    m = az_matrix(AZSpec.make("exponential", [1, 1, 0, 0, 0, 0, 0], [lam + mu, mu, 0, 0, 0, 0, 0]), 6)
    for n in range(6):
        assert m[n, n] == lam + mu + n
        if n:
            assert m[n, n - 1] == n * mu
        assert all(not m[n, k] for k in range(n - 1))


def test_conversions_for_T():
    a, z = az_from_fg(T_SPEC.F, T_SPEC.G)
    o = a.order
    assert a == exp_series(1, o) * geometric(1, o)
    assert z == (exp_series(1, o) * geometric(1, o) * geometric(1, o)).truncate(z.order)
    ph, ps = spec_conversions("phi_psi_from_az", a, z)
    assert ph == exp_series(1, ph.order) and ps == geometric(1, ps.order)
    a2, z2 = spec_conversions("az_from_phi_psi", ph, ps)
    assert a2.agrees_with(a) and z2.agrees_with(z)
    f, g = spec_conversions("fg_from_az", a, z)
    assert f.agrees_with(T_SPEC.F) and g.agrees_with(T_SPEC.G)


def test_converse_example_phi_psi():
    a, z = TruncSeries([1, 1], 6), TruncSeries([2, 1], 6)
    ph, ps = phi_psi_from_az(a, z)
    assert ph == exp_series(-1, 6)
    assert ps == exp_series(1, 6) * TruncSeries([1, 1], 6)


def test_eaz_phi_psi_examples():
    phis = [poly(phi(m)) for m in range(N + 1)]
    from treetp.linalg import sharp_scale, toeplitz
    psi_one = eaz_phi_psi_factorization(phis, [1] + [0] * N, 0, N)
    assert psi_one == (sharp_scale(toeplitz(phis, N + 1)) @ shift_delta(N + 1)).block(N)
    row = eaz_phi_psi_factorization([Fraction(1, factorial(m)) for m in range(N + 1)], [1] * (N + 1), 0, N).row(3)
    assert list(row[:5]) == [49, 49, 24, 7, 1]
    ys = [poly(Y) ** m for m in range(N + 1)]
    ph, ps = TruncSeries(phis, N), TruncSeries(ys, N)
    a, z = ph * ps, ph.truncate(N - 1) * ps.derivative()
    shifted = [z[i] + a[i] * poly(XI) for i in range(N)]
    lhs = az_matrix(AZSpec.make("exponential", a.coeffs[:N + 1], shifted), N)
    assert lhs == eaz_phi_psi_factorization(phis, ys, XI, N)


def test_rowgen_examples():
    assert rowgen_matrix(matrix_T(4))[3, 0] == (poly(X) + 3) ** 3
    assert rowgen_matrix(identity(5)) == binomial(X, 1, 5)
    g = rowgen_matrix(matrix_T_yz(3, "brute-force"))[2, 0]
    assert g.substitute({Y: 1, "z": 1}) == (poly(X) + 2) ** 2


def test_zeroth_first_examples():
    assert zeroth_first_test(matrix_T(7), 1)
    assert zeroth_first_test(prodmat_explicit("T_yz", 6), Y)
    assert not zeroth_first_test(binomial(X, 1, 5), 1)


def test_hankel_of_output():
    left, right = hankel_of_output(prodmat_explicit("T", 9), 5)
    assert left == right
    assert [left[0, j] for j in range(5)] == [1, 1, 4, 27, 256]
    with pytest.raises(ValueError):
        hankel_of_output(prodmat_explicit("T", 5), 5)


@st.composite
def exp_specs(draw, order=5):
    f = [1] + [draw(rationals) for _ in range(order)]
    g = [0, draw(rationals.filter(lambda v: v != 0))] + [draw(rationals) for _ in range(order - 1)]
    return RiordanSpec.exponential(TruncSeries(f), TruncSeries(g))


@given(exp_specs())
def test_output_of_production_recovers_matrix(spec):
    if spec.G[1] != 1:
        return
    m = riordan_matrix(spec, 6)
    assert output_matrix(production_matrix(m)) == m


@given(exp_specs())
def test_production_matches_eaz_of_series(spec):
    m = riordan_matrix(spec, 6)
    if spec.G[1] != 1:
        return
    a, z = az_from_fg(spec.F, spec.G)
    eaz = az_matrix(AZSpec.from_series(a, z), 5)
    assert production_matrix(m).block(4) == eaz.block(4)


@given(exp_specs(), exp_specs())
def test_product_spec_matches_matrix_product(s1, s2):
    assert riordan_matrix(riordan_product(s1, s2), 6) == riordan_matrix(s1, 6) @ riordan_matrix(s2, 6)


@given(st.lists(rationals, min_size=7, max_size=7), st.lists(rationals, min_size=7, max_size=7))
def test_conjugation_lemma_random_sequences(a, z):
    eaz = az_matrix(AZSpec.make("exponential", a, z), 6)
    left = eaz.conjugate_by(binomial(XI, 1, 6)).block(5)
    right = az_matrix(AZSpec.make("exponential", a, [zi + ai * poly(XI) for ai, zi in zip(a, z)]), 5)
    assert left == right


@given(st.integers(0, 3))
def test_binomial_production_is_tp(c):
    p = production_matrix(binomial(c, 1, 6))
    assert check_tp_order(p.block(5), 3).ok
