from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dopcalc.exactalg import (
    GF,
    QQ,
    DivisionByZero,
    ParseError,
    PolyRing,
    VariableCountMismatch,
    format_polynomial,
    hasse_derivative,
    parse_polynomial,
    poly_arith,
)

PRIMES = [2, 3, 5, 7, 101]


def test_rational_inverse_and_sum():
    assert QQ.field_arith(None, QQ(Fraction(2, 3)), "inv") == QQ(Fraction(3, 2))
    assert QQ.field_arith(QQ(Fraction(1, 2)), QQ(Fraction(1, 3)), "add") == QQ(Fraction(5, 6))


def test_prime_field_inverse():
    F7 = GF(7)
    assert F7.field_arith(None, 3, "inv") == 5
    assert F7.mul(3, 5) == 1


def test_inverse_of_zero_raises():
    with pytest.raises(DivisionByZero):
        QQ.inv(QQ(0))
    with pytest.raises(DivisionByZero):
        GF(5).inv(0)


def test_non_prime_modulus_rejected():
    with pytest.raises(ValueError):
        GF(6)
    with pytest.raises(ValueError):
        GF(2**31 + 11)


def test_difference_of_squares():
    S = PolyRing(QQ, ["x", "y"])
    x, y = S.gens()
    assert poly_arith(x + y, x - y, "mul") == S.parse("x^2 - y^2")


def test_frobenius_on_sums_in_characteristic_two():
    S = PolyRing(GF(2), ["x", "y"])
    x, y = S.gens()
    assert (x + y) ** 2 == x**2 + y**2


def test_mismatched_variable_counts():
    S2 = PolyRing(QQ, ["x", "y"])
    S3 = PolyRing(QQ, ["x", "y", "z"])
    with pytest.raises(VariableCountMismatch):
        S2.var(0) + S3.var(0)
    with pytest.raises(VariableCountMismatch):
        S2.poly({(1, 0, 0): 1})
    with pytest.raises(VariableCountMismatch):
        PolyRing(QQ, ["x", "y"], [1])


def test_big_rationals_are_exact():
    a = QQ(Fraction(2**70 + 1, 3**45))
    b = QQ(Fraction(5**40, 2**67 - 1))
    s = QQ.add(a, b)
    assert Fraction(int(s.numerator), int(s.denominator)) == Fraction(2**70 + 1, 3**45) + Fraction(
        5**40, 2**67 - 1
    )
    assert QQ.mul(a, QQ.inv(a)) == QQ.one


def test_parse_grammar_and_errors():
    f = parse_polynomial("3/2*x^2*y - x y + 7", ["x", "y"])
    assert f == {(2, 1): QQ(Fraction(3, 2)), (1, 1): QQ(-1), (0, 0): QQ(7)}
    with pytest.raises(ParseError) as err:
        parse_polynomial("x + q", ["x", "y"])
    assert err.value.column == 5
    with pytest.raises(ParseError):
        parse_polynomial("x^", ["x"])
    with pytest.raises(ParseError):
        parse_polynomial("(x + 1", ["x"])


def test_parse_reduces_coefficients_mod_p():
    assert parse_polynomial("7*x + 3", ["x"], GF(5)) == {(1,): 2, (0,): 3}


def test_hasse_derivative_in_characteristic_two():
    # D^(2) x^3 = C(3, 2) x = x, although d^2/dx^2 x^3 = 6x = 0 mod 2
    assert hasse_derivative(GF(2), {(3,): 1}, (2,)) == {(1,): 1}


def test_weighted_degree():
    S = PolyRing(QQ, ["a", "b"], [2, 3])
    f = S.parse("a^3 + b^2")
    assert f.is_homogeneous() and f.homogeneous_degree == 6
    assert not S.parse("a + b").is_homogeneous()


@st.composite
def field_triples(draw):
    p = draw(st.sampled_from([0] + PRIMES))
    if p:
        elems = st.integers(0, p - 1)
    else:
        elems = st.fractions(max_denominator=10**6).filter(lambda q: abs(q) < 10**30)
    F = GF(p) if p else QQ
    a, b, c = (F(draw(elems)) for _ in range(3))
    return F, a, b, c


@given(field_triples())
@settings(max_examples=200, deadline=None)
def test_field_axioms(t):
    F, a, b, c = t
    assert F.add(a, b) == F.add(b, a)
    assert F.mul(a, b) == F.mul(b, a)
    assert F.add(F.add(a, b), c) == F.add(a, F.add(b, c))
    assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
    assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
    assert F.add(a, F.neg(a)) == F.zero
    if a:
        assert F.mul(a, F.inv(a)) == F.one


@st.composite
def polynomials(draw, field=QQ, nvars=3):
    n = draw(st.integers(0, 5))
    terms = {}
    for _ in range(n):
        e = tuple(draw(st.integers(0, 3)) for _ in range(nvars))
        c = draw(st.integers(-20, 20)) if field.p == 0 else draw(st.integers(0, field.p - 1))
        if field.p == 0 and draw(st.booleans()):
            c = Fraction(c, draw(st.integers(1, 9)))
        terms[e] = field(c)
    return {m: c for m, c in terms.items() if c}


@given(polynomials())
@settings(max_examples=200, deadline=None)
def test_format_parse_round_trip(f):
    names = ["x", "y", "z"]
    text = format_polynomial(f, names)
    assert parse_polynomial(text, names) == f


@given(polynomials(GF(7)))
@settings(max_examples=100, deadline=None)
def test_format_parse_round_trip_mod_p(f):
    names = ["x", "y", "z"]
    F = GF(7)
    assert parse_polynomial(format_polynomial(f, names, F), names, F) == f


@given(polynomials(), polynomials(), polynomials())
@settings(max_examples=100, deadline=None)
def test_polynomial_ring_axioms(f, g, h):
    S = PolyRing(QQ, ["x", "y", "z"])
    F, G, H = S.poly(f), S.poly(g), S.poly(h)
    assert F * (G + H) == F * G + F * H
    assert (F * G) * H == F * (G * H)
    assert F - F == 0
