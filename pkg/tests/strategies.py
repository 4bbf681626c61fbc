"""Hypothesis strategies shared by the test modules."""

from fractions import Fraction

from hypothesis import strategies as st

from treetp.polyring import Polynomial

small_ints = st.integers(min_value=-4, max_value=4)
coeffs = st.one_of(small_ints, st.fractions(min_value=-3, max_value=3, max_denominator=4))


@st.composite
def polynomials(draw, nvars=3, max_terms=4, max_exp=3):
    """Polynomials in x, y, z (slots 0..nvars-1)."""
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        mono = tuple(draw(st.integers(0, max_exp)) for _ in range(nvars))
        terms[mono] = terms.get(mono, 0) + Fraction(draw(coeffs))
    return Polynomial(terms)


nonneg_polys = polynomials().map(
    lambda p: Polynomial({m: abs(c) for m, c in p.items()})
)
