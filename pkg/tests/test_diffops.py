from __future__ import annotations

import pytest

from dopcalc.algebra import PresentedAlgebra
from dopcalc.diffops import (
    DiffOperator,
    ModuleMismatch,
    OperatorSpace,
    WindowTooNarrow,
    bracket_order_check,
    compose,
    d_simplicity_probe,
    diff_ops,
    frobenius_operators,
    inclusion_rank,
    operator_table,
    residue_operators,
    verified_order,
)
from dopcalc.exactalg import GF, QQ
from dopcalc.graded import poly_to_elem

from oracles import bracket_operator_dims, line_operator_dims


def ring(names, rels=(), field=QQ, weights=None):
    return PresentedAlgebra(field, names, weights or [1] * len(names), list(rels))


LINE = ring(["x"])
PLANE = ring(["x", "y"])
FAT_POINT = ring(["x", "y"], ["x^2", "x*y", "y^2"])
QUADRIC_CONE = ring(["a", "b", "c"], ["b^2 - a*c"])
ELLIPTIC_CONE = ring(["x", "y", "z"], ["x^3 + y^3 + z^3"])
ELLIPTIC_CONE_F2 = ring(["x", "y", "z"], ["x^3 + y^3 + z^3"], GF(2))

FIXTURES = [LINE, ring(["x"], field=GF(2)), PLANE, FAT_POINT, ring(["x"], ["x^2"]), QUADRIC_CONE,
            ELLIPTIC_CONE_F2]


def euler(R):
    def action(m):
        out = {}
        for t, c in m.items():
            d = R.field(R.degree(t[1:]))
            if d:
                out[t] = R.field.mul(c, d)
        return out

    return action


@pytest.mark.parametrize("n", range(5))
def test_line_matches_monomial_count(n):
    table, _ = diff_ops(LINE, n, -4, 3)
    assert table == {k: line_operator_dims(n, k) for k in range(-4, 4)}


@pytest.mark.parametrize(
    "R, n, k, D",
    [
        (LINE, 3, -2, 7),
        (ring(["x"], field=GF(2)), 2, 0, 6),
        (ring(["x"], field=GF(3)), 3, 0, 7),
        (PLANE, 2, -1, 5),
        (QUADRIC_CONE, 1, 0, 4),
        (QUADRIC_CONE, 2, -1, 5),
        (ELLIPTIC_CONE, 2, 0, 5),
        (ELLIPTIC_CONE_F2, 2, 0, 5),
    ],
    ids=lambda v: repr(v),
)
def test_dimensions_agree_with_bracket_oracle(R, n, k, D):
    assert OperatorSpace(R, n).dim(k) == bracket_operator_dims(R, n, k, D)


def test_divided_powers_in_characteristic_two():
    R = ring(["x"], field=GF(2))
    space = OperatorSpace(R, 2)
    assert space.dim(0) == 3
    # the only degree -2 operator is the divided power, which sends x^3 to x
    (op,) = space.basis(-2)
    assert op.apply_poly(R.parse("x^3")) == poly_to_elem(R.parse("x"))


def test_second_hasse_derivative_on_cube():
    R = ring(["x"], field=GF(2))
    op = DiffOperator.from_action(R, 2, _hasse2(R), -2)
    assert op.is_well_defined()
    assert op.apply_poly(R.parse("x^3")) == poly_to_elem(R.parse("x"))
    assert verified_order(op, R.free([0]), 0, 8, 3) == 2


def _hasse2(R):
    def action(m):
        out = {}
        for t, c in m.items():
            a = t[1]
            v = R.field.mul(c, R.field(a * (a - 1) // 2))
            if v and a >= 2:
                out[(t[0], a - 2)] = v
        return out

    return action


@pytest.mark.parametrize("R", [LINE, PLANE, QUADRIC_CONE, ELLIPTIC_CONE], ids=repr)
def test_euler_operator_has_order_one(R):
    op = DiffOperator.from_action(R, 1, euler(R), 0)
    assert op.is_well_defined()
    assert verified_order(op, R.free([0]), 0, 6, 2) == 1
    e = R.basis(2)[0]
    assert op.apply_poly({e: R.field.one}) == poly_to_elem({e: R.field(2)})


@pytest.mark.parametrize("R", FIXTURES, ids=repr)
def test_every_basis_operator_passes_its_bracket_check(R):
    for n in range(3):
        space = OperatorSpace(R, n)
        for k in range(-2, 2):
            for op in space.basis(k):
                assert op.is_well_defined()
                assert bracket_order_check(op, n, R.free([0]), 0, n + 5)


@pytest.mark.parametrize("R", FIXTURES, ids=repr)
def test_order_filtration_is_monotone(R):
    table = operator_table(R, range(4), -3, 2)
    for n in range(3):
        for k in range(-3, 3):
            assert table[(n, k)] <= table[(n + 1, k)]
            assert inclusion_rank(R, n, k) == table[(n, k)]


def test_composition_adds_orders():
    space = OperatorSpace(PLANE, 1)
    ops = [op for k in (-1, 0) for op in space.basis(k)]
    for d1 in ops[:3]:
        for d2 in ops[:3]:
            c = compose(d1, d2)
            assert c.order == 2 and c.degree == d1.degree + d2.degree
            assert c.is_well_defined()
            assert bracket_order_check(c, 2, PLANE.free([0]), 0, 7)
            for t in ["x^2*y", "y^3", "x*y"]:
                f = poly_to_elem(PLANE.parse(t))
                assert c.apply(f) == d2.apply(d1.apply(f))


def test_composition_is_associative():
    space = OperatorSpace(QUADRIC_CONE, 1)
    a, b, c = space.basis(0)[:3]
    left = compose(compose(a, b), c)
    right = compose(a, compose(b, c))
    for d in range(0, 4):
        for e in QUADRIC_CONE.basis(d):
            m = {(0,) + e: QQ(1)}
            assert left.apply(m) == right.apply(m)


def test_composition_rejects_mismatched_modules():
    a = OperatorSpace(PLANE, 1).basis(0)[0]
    b = OperatorSpace(PLANE, 1, N=PLANE.residue_field()).basis(0)[0]
    with pytest.raises(ModuleMismatch):
        compose(b, a)


def test_derivative_squared_has_exact_order_two():
    d = DiffOperator.from_action(LINE, 1, _derivative(LINE), -1)
    dd = compose(d, d)
    assert verified_order(dd, LINE.free([0]), 0, 8, 3) == 2


def _derivative(R):
    def action(m):
        out = {}
        for t, c in m.items():
            if t[1]:
                out[(t[0], t[1] - 1)] = R.field.mul(c, R.field(t[1]))
        return out

    return action


def test_bracket_check_refutes_too_small_order():
    dd = DiffOperator.from_action(LINE, 2, _hasse2(LINE), -2)
    res = bracket_order_check(dd, 1, LINE.free([0]), 0, 6)
    assert not res and res.witness is not None


def test_bracket_check_needs_room():
    op = DiffOperator.from_action(LINE, 1, euler(LINE), 0)
    with pytest.raises(WindowTooNarrow):
        bracket_order_check(op, 3, LINE.free([0]), 0, 2)


def test_residue_operators_on_fat_point_reverse_hilbert_function():
    for n in (2, 3):
        table, _ = residue_operators(FAT_POINT, n, -2, 0)
        assert table == {-2: 0, -1: 2, 0: 1}


def test_plane_is_simple_up_to_bound():
    assert d_simplicity_probe(PLANE, 2, 2).verdict() == "SimpleUpToBound"


def test_elliptic_cone_has_obstruction_in_degree_minus_one():
    rep = d_simplicity_probe(ELLIPTIC_CONE, 3, 1)
    assert rep.obstruction is not None and rep.obstruction[0] == -1
    assert rep.verdict().startswith("Obstruction(degree=-1")


def test_frobenius_operators_on_a_line():
    table, F = frobenius_operators(ring(["x"], field=GF(2)), 1, -1, 1)
    # R = F_2[x] is free over A = F_2[x^2] on 1 and x, so the pieces are
    # A_k + A_k + A_{k-1} + A_{k+1}
    assert table == {-1: 1, 0: 2, 1: 2}
    assert all(op.rank_on(d) in (0, 1) for op in F.operators(0) for d in range(4))


def test_frobenius_needs_positive_characteristic():
    with pytest.raises(ValueError):
        frobenius_operators(LINE, 1, 0, 0)


def test_operators_of_small_order_are_linear_over_pth_powers():
    p = 3
    R = ring(["x", "y"], field=GF(p))
    cube = R.parse("x^3 + x^3*y^3")
    for n in range(p):
        space = OperatorSpace(R, n)
        for k in (-1, 0):
            for op in space.basis(k):
                for t in ["x", "y^2", "x*y"]:
                    f = R.parse(t)
                    lhs = op.apply_poly(R.mul(cube, f))
                    rhs = {(0,) + e: c for e, c in R.mul(cube, {e[1:]: c for e, c in op.apply_poly(f).items()}).items()}
                    assert lhs == rhs
