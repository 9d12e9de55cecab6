from __future__ import annotations

import pytest

from dopcalc.algebra import (
    InhomogeneousRelation,
    PresentedAlgebra,
    PrincipalParts,
    canonical_module,
    enveloping,
    noether_variables,
)
from dopcalc.exactalg import GF, QQ
from dopcalc.graded import minimal_generators, poly_to_elem


def ring(names, rels=(), field=QQ, weights=None):
    return PresentedAlgebra(field, names, weights or [1] * len(names), list(rels))


FAT_POINT = ring(["x", "y"], ["x^2", "x*y", "y^2"])
QUADRIC_CONE = ring(["a", "b", "c"], ["b^2 - a*c"])
ELLIPTIC_CONE = ring(["x", "y", "z"], ["x^3 + y^3 + z^3"])


def test_dimension_and_normalization():
    assert ring(["x", "y"]).dimension == 2
    assert QUADRIC_CONE.dimension == 2
    assert FAT_POINT.dimension == 0 and FAT_POINT.is_artinian()
    assert noether_variables(QUADRIC_CONE) == (0, 2)
    assert noether_variables(FAT_POINT) == ()


def test_inhomogeneous_relation_rejected():
    with pytest.raises(InhomogeneousRelation):
        ring(["x", "y"], ["x^2 - y"])


@pytest.mark.parametrize("R", [ring(["x"]), FAT_POINT, QUADRIC_CONE], ids=repr)
def test_enveloping_hilbert_function_is_a_convolution(R):
    P = enveloping(R).ring
    for k in range(0, 5):
        assert P.hilbert(k) == sum(R.hilbert(i) * R.hilbert(k - i) for i in range(k + 1))


def test_enveloping_algebra_of_fat_point():
    E = enveloping(FAT_POINT)
    assert sum(E.ring.hilbert_window(0, 4).values()) == 9
    assert E.diagonal_power(3) == []
    assert len(E.diagonal_power(2)) > 0


def test_multiplication_kills_the_diagonal():
    E = enveloping(QUADRIC_CONE)
    for g in E.diagonal:
        assert E.multiplication(g) == {}
    f = QUADRIC_CONE.parse("a*b + c^2")
    assert E.multiplication(E.left(f)) == f
    assert E.multiplication(E.right(f)) == f
    assert E.swap(E.swap(E.left(f))) == E.left(f)
    assert E.swap(E.left(f)) == E.right(f)


@pytest.mark.parametrize("n", range(5))
def test_principal_parts_of_a_line_are_free(n):
    pp = PrincipalParts(ring(["x"]), n)
    assert minimal_generators(pp.module) == list(range(n + 1))
    for k in range(0, 2 * n + 2):
        assert pp.module.dim(k) == min(k, n) + 1


@pytest.mark.parametrize("R", [ring(["x", "y"]), FAT_POINT, QUADRIC_CONE, ELLIPTIC_CONE], ids=repr)
def test_order_zero_principal_parts_is_the_ring(R):
    pp = PrincipalParts(R, 0)
    for k in range(0, 5):
        assert pp.module.dim(k) == R.hilbert(k)


def test_universal_map_is_taylor_expansion():
    R = ring(["x"])
    pp = PrincipalParts(R, 2)
    d = pp.universal(poly_to_elem(R.parse("x^3")))
    # 1 (x) x^3 = x^3 + 3 x^2 y + 3 x y^2 (mod y^3)
    assert d == {
        (pp.position((0,)), 3): QQ(1),
        (pp.position((1,)), 2): QQ(3),
        (pp.position((2,)), 1): QQ(3),
    }
    assert pp.multiplication_map(d) == poly_to_elem(R.parse("x^3"))


def test_hasse_expansion_in_characteristic_two():
    R = ring(["x"], field=GF(2))
    pp = PrincipalParts(R, 2)
    d = pp.universal(poly_to_elem(R.parse("x^3")))
    # C(3, 1) = 1 and C(3, 2) = 1 mod 2
    assert d == {
        (pp.position((0,)), 3): 1,
        (pp.position((1,)), 2): 1,
        (pp.position((2,)), 1): 1,
    }


def test_principal_parts_surjections_compose():
    R = QUADRIC_CONE
    p2, p1, p0 = (PrincipalParts(R, n) for n in (2, 1, 0))
    imgs21 = p2.surjection_images(p1)
    imgs20 = p2.surjection_images(p0)
    imgs10 = p1.surjection_images(p0)
    for g in range(p2.module.rank):
        via = {}
        for t, c in imgs21[g].items():
            for u, a in imgs10[t[0]].items():
                via[(u[0],) + tuple(x + y for x, y in zip(u[1:], t[1:]))] = c * a
        assert via == imgs20[g]


@pytest.mark.parametrize(
    "R, a",
    [(ring(["x"]), -1), (ring(["x", "y"]), -2), (QUADRIC_CONE, -1), (ELLIPTIC_CONE, 0),
     (ring(["x"], ["x^2"]), 1)],
    ids=repr,
)
def test_canonical_shift(R, a):
    omega = canonical_module(R)
    assert omega.cohen_macaulay
    assert omega.a == a


def test_canonical_module_of_fat_point_is_not_free():
    omega = canonical_module(FAT_POINT)
    assert not omega.gorenstein
    with pytest.raises(ValueError):
        omega.as_shift()


def test_weighted_canonical_shift():
    # K[a, b]/(a^3 - b^2) with deg a = 2, deg b = 3 is a hypersurface of degree 6
    R = ring(["a", "b"], ["a^3 - b^2"], weights=[2, 3])
    assert canonical_module(R).a == 6 - 5


@pytest.mark.parametrize("R", [ring(["x", "y"]), QUADRIC_CONE, FAT_POINT], ids=repr)
def test_principal_parts_hilbert_function_stabilizes(R):
    E = enveloping(R)
    for t in range(0, 4):
        dims = [PrincipalParts(R, n).module.dim(t) for n in range(0, 5)]
        assert dims == sorted(dims)
        for n in range(t, 5):
            assert dims[n] == E.diagonal_quotient(n + 1).dim(t) == E.ring.hilbert(t)
