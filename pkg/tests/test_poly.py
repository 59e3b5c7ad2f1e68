from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from lpreps.poly import (
    Poly,
    derivative,
    horner,
    isolate_roots,
    poly_divmod,
    poly_gcd,
    sign_runs,
    squarefree,
    sum_over_range,
)

small = st.fractions(min_value=-8, max_value=8, max_denominator=16)
coefficient_lists = st.lists(small, min_size=1, max_size=6)


def test_arithmetic_and_evaluation():
    x = Poly.variable(0)
    p = (x + 1) ** 2 - Poly.constant(1)
    assert p.coeffs() == [0, 2, 1]
    assert p(Fraction(1, 2)) == Fraction(5, 4)
    assert p.partial(0).coeffs() == [2, 2]
    assert p.antiderivative().coeffs() == [0, 0, 1, Fraction(1, 3)]


def test_bivariate_integration():
    x, y = Poly.variable(0, 2), Poly.variable(1, 2)
    p = x * y
    inner = p.integrate(1, 0, 1)
    assert inner.evaluate([Fraction(1, 2), 0]) == Fraction(1, 4)


@given(coefficient_lists, coefficient_lists)
def test_divmod_identity(num, den):
    if not any(den):
        return
    q, r = poly_divmod(num, den)
    product = Poly.univariate(q) * Poly.univariate(den) + Poly.univariate(r)
    assert product == Poly.univariate(num)
    while den and not den[-1]:
        den = den[:-1]
    assert len(r) < len(den)


def test_gcd_and_squarefree():
    # (x - 1)^2 (x + 2)
    coeffs = [2, -3, 0, 1]
    assert poly_gcd(coeffs, derivative(coeffs)) == [-1, 1]
    assert squarefree(coeffs) == [-2, 1, 1]


@settings(max_examples=60, deadline=None)
@given(st.lists(st.fractions(min_value=-2, max_value=2, max_denominator=8), min_size=1, max_size=4, unique=True))
def test_isolated_roots_match_sympy(roots):
    x = sympy.Symbol("x")
    expr = sympy.expand(sympy.prod([x - sympy.Rational(r.numerator, r.denominator) for r in roots]))
    coeffs = [Fraction(str(c)) for c in reversed(sympy.Poly(expr, x).all_coeffs())]
    found = isolate_roots(coeffs, -3, 3)
    assert len(found) == len(roots)
    for root, expected in zip(found, sorted(roots)):
        assert root.lo <= expected <= root.hi


def test_irrational_root_is_bracketed():
    (root,) = isolate_roots([-2, 0, 1], 0, 2, width=Fraction(1, 2**40))
    assert not root.exact
    assert root.lo**2 < 2 < root.hi**2
    assert root.hi - root.lo <= Fraction(1, 2**40)


def test_zero_polynomial_rejected():
    with pytest.raises(ValueError):
        isolate_roots([0], 0, 1)


def test_sum_over_range_matches_direct_sum():
    coeffs = [Fraction(1, 3), -2, Fraction(1, 2)]
    assert sum_over_range(coeffs, -4, 9) == sum(horner(coeffs, Fraction(j)) for j in range(-4, 10))


def test_sign_runs_cover_the_range():
    coeffs = [-6, 1, 1]  # (x + 3)(x - 2)
    runs = sign_runs(coeffs, -5, 5)
    assert runs[0][0] == -5 and runs[-1][1] == 5
    for first, last, sign in runs:
        for j in range(first, last + 1):
            value = horner(coeffs, Fraction(j))
            assert (value > 0) - (value < 0) == sign
