from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dopcalc.exactalg import GF, QQ, parse_polynomial, poly_add, poly_mul
from dopcalc.groebner import (
    DegreeBoundTooSmall,
    MonomialOrder,
    buchberger,
    groebner_ideal,
    normal_form,
    syzygies,
)

XY = ["x", "y"]


def _ideal(field, texts, names=XY, weights=None):
    polys = [parse_polynomial(t, names, field) for t in texts]
    return groebner_ideal(field, polys, weights or [1] * len(names))


def _elem(text, names=XY, field=QQ, pos=0):
    return {(pos,) + m: c for m, c in parse_polynomial(text, names, field).items()}


def _contract(field, syz, elements):
    out = {}
    for t, c in syz.items():
        g = elements[t[0]]
        for u, a in g.items():
            e = (u[0],) + tuple(x + y for x, y in zip(u[1:], t[1:]))
            v = out.get(e, 0) + c * a
            if field.p:
                v %= field.p
            if v:
                out[e] = v
            else:
                out.pop(e, None)
    return out


def test_basis_acquires_cubic():
    gb = _ideal(QQ, ["x^2 - y^2", "x*y"])
    assert sorted(gb.lts) == sorted([(0, 2, 0), (0, 1, 1), (0, 0, 3)])
    assert gb.contains(_elem("y^3"))
    assert not gb.contains(_elem("y^2"))


def test_normal_forms():
    gb = _ideal(QQ, ["x^2 - y^2", "x*y"])
    assert normal_form(_elem("x^2"), gb) == _elem("y^2")
    assert normal_form(_elem("x^3 + x*y + 2*x"), gb) == _elem("2*x")


def test_syzygies_of_three_generators():
    gb = _ideal(QQ, ["x^2 - y^2", "x*y"])
    syz = syzygies(QQ, gb)
    assert syz
    for s in syz:
        assert _contract(QQ, s, gb.elements) == {}


def test_koszul_syzygy_of_the_variables():
    gb = _ideal(QQ, ["x", "y"])
    syz = syzygies(QQ, gb)
    assert len(syz) == 1
    s = syz[0]
    assert _contract(QQ, s, gb.elements) == {}
    # the single relation is y e_x - x e_y up to sign
    assert sorted(s) == sorted([(0, 0, 1), (1, 1, 0)]) or sorted(s) == sorted(
        [(0, 1, 0), (1, 0, 1)]
    )


def test_module_basis_over_two_positions():
    order = MonomialOrder([1, 1], shifts=(0, 0))
    gens = [
        {(0, 1, 0): QQ(1), (1, 0, 1): QQ(1)},
        {(0, 0, 1): QQ(1), (1, 1, 0): QQ(-1)},
    ]
    gb = buchberger(QQ, gens, order)
    # x * g2 - y * g1 = -(x^2 + y^2) e_2
    assert gb.contains({(1, 2, 0): QQ(1), (1, 0, 2): QQ(1)})
    for s in syzygies(QQ, gb):
        assert _contract(QQ, s, gb.elements) == {}


def test_characteristic_dependence():
    # over F_2, x^2 + y^2 = (x + y)^2 so the ideal (x+y, x^2+y^2) is principal
    gb2 = _ideal(GF(2), ["x + y", "x^2 + y^2"])
    assert len(gb2) == 1
    gbq = _ideal(QQ, ["x + y", "x^2 + y^2"])
    assert gbq.contains(_elem("y^2"))


def test_truncated_basis_refuses_higher_degrees():
    polys = [parse_polynomial(t, XY) for t in ["x^2 - y^2", "x*y"]]
    gb = groebner_ideal(QQ, polys, [1, 1], degree_bound=2)
    assert not gb.is_complete()
    with pytest.raises(DegreeBoundTooSmall):
        gb.normal_form(_elem("y^3"))


def test_weighted_homogeneous_ideal():
    # a^3 - b^2 with deg a = 2, deg b = 3
    gb = _ideal(QQ, ["a^3 - b^2"], ["a", "b"], [2, 3])
    assert len(gb) == 1


@st.composite
def small_polys(draw):
    terms = {}
    for _ in range(draw(st.integers(0, 4))):
        e = (draw(st.integers(0, 3)), draw(st.integers(0, 3)))
        terms[e] = QQ(draw(st.integers(-5, 5)))
    return {m: c for m, c in terms.items() if c}


GB = _ideal(QQ, ["x^2 - y^2", "x*y"])


def _nf(f):
    return GB.normal_form({(0,) + m: c for m, c in f.items()})


@given(small_polys(), small_polys())
@settings(max_examples=100, deadline=None)
def test_normal_form_is_linear(f, g):
    lhs = _nf(poly_add(QQ, f, g))
    rhs = {}
    for t, c in list(_nf(f).items()) + list(_nf(g).items()):
        rhs[t] = rhs.get(t, 0) + c
    assert lhs == {t: c for t, c in rhs.items() if c}


@given(small_polys(), small_polys())
@settings(max_examples=100, deadline=None)
def test_normal_form_kills_ideal_members(f, g):
    a = parse_polynomial("x^2 - y^2", XY)
    b = parse_polynomial("x*y", XY)
    h = poly_add(QQ, poly_mul(QQ, f, a), poly_mul(QQ, g, b))
    assert _nf(h) == {}
