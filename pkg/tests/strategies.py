"""Shared hypothesis strategies."""

from fractions import Fraction

from hypothesis import strategies as st

from semgb.polyring import Polynomial, Ring


def coefficients(max_num=5, max_den=3):
    return st.builds(
        Fraction,
        st.integers(-max_num, max_num).filter(bool),
        st.integers(1, max_den),
    )


def monomials(n, max_exp=3):
    return st.tuples(*[st.integers(0, max_exp) for _ in range(n)])


def polynomials(ring: Ring, max_terms=4, max_exp=3, allow_zero=True):
    terms = st.dictionaries(monomials(ring.ngens, max_exp), coefficients(), max_size=max_terms)
    polys = terms.map(lambda t: Polynomial(ring, t))
    if not allow_zero:
        polys = polys.filter(lambda p: not p.is_zero())
    return polys
