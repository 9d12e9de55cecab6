from __future__ import annotations

import pytest

from dopcalc.algebra import PresentedAlgebra, canonical_module
from dopcalc.exactalg import GF, QQ
from dopcalc.graded import (
    GradedModule,
    HomModule,
    NotHomogeneous,
    Resolution,
    ext,
    ext_dims,
    hom_dims,
    minimal_generators,
    poly_to_elem,
)


def ring(names, rels=(), field=QQ, weights=None):
    return PresentedAlgebra(field, names, weights or [1] * len(names), list(rels))


def residue(R):
    return R.residue_field()


def cyclic(R, texts):
    return GradedModule(R, [0], [poly_to_elem(R.parse(t)) for t in texts])


FIXTURES = [
    ring(["x"]),
    ring(["x", "y"]),
    ring(["x"], ["x^2"]),
    ring(["x", "y"], ["x^2", "x*y", "y^2"]),
    ring(["a", "b", "c"], ["b^2 - a*c"]),
    ring(["x", "y", "z"], ["x^3 + y^3 + z^3"], GF(2)),
]


def test_resolution_of_residue_field_over_a_line():
    res = Resolution(residue(ring(["x"])), 3)
    assert res.betti() == [1, 1, 0, 0]
    assert res.degrees[1] == [1]


def test_resolution_of_residue_field_over_a_plane():
    res = Resolution(residue(ring(["x", "y"])), 3)
    assert res.betti() == [1, 2, 1, 0]
    assert res.degrees[1] == [1, 1] and res.degrees[2] == [2]


def test_resolution_over_dual_numbers_is_infinite():
    res = Resolution(residue(ring(["x"], ["x^2"])), 4)
    assert res.betti() == [1, 1, 1, 1, 1]
    assert [d for (d,) in res.degrees] == [0, 1, 2, 3, 4]


@pytest.mark.parametrize("R", FIXTURES, ids=repr)
def test_differentials_compose_to_zero(R):
    for M in (R.free([0]), residue(R)):
        assert Resolution(M, 3).check_complex()


@pytest.mark.parametrize("names", [["x"], ["x", "y"], ["x", "y", "z"]])
def test_euler_characteristic_of_koszul_resolution(names):
    R = ring(names)
    K = residue(R)
    res = Resolution(K, len(names) + 1)
    for d in range(0, 5):
        chi = 0
        for i, degs in enumerate(res.degrees):
            chi += (-1) ** i * sum(R.hilbert(d - a) for a in degs)
        assert chi == K.dim(d)


def test_ext_one_of_residue_field_over_a_line():
    R = ring(["x"])
    dims = ext_dims(residue(R), R.free([0]), 1, -3, 3)
    # the class of x^* lives where Hom(R(-1), R) = R(1) has its generator
    assert dims == {-3: 0, -2: 0, -1: 1, 0: 0, 1: 0, 2: 0, 3: 0}


def test_hom_from_a_shifted_free_module():
    R = ring(["x"])
    dims = hom_dims(R.free([1]), R.free([0]), -3, 2)
    assert dims == {k: R.hilbert(k + 1) for k in range(-3, 3)}


@pytest.mark.parametrize("R", FIXTURES, ids=repr)
def test_ext_zero_is_hom(R):
    pairs = [(residue(R), R.free([0])), (R.free([0, 1]), residue(R))]
    if R.nvars >= 2:
        pairs.append((cyclic(R, [R.names[0]]), cyclic(R, [R.names[1]])))
    for M, N in pairs:
        H = HomModule(M, N).module
        assert ext_dims(M, N, 0, -3, 3) == {k: H.dim(k) for k in range(-3, 4)}


def test_hilbert_windows():
    def window(R, hi):
        return list(R.hilbert_window(0, hi).values())

    assert window(ring(["x", "y"]), 3) == [1, 2, 3, 4]
    assert window(ring(["x", "y"], ["x^2", "x*y", "y^2"]), 2) == [1, 2, 0]
    assert window(ring(["a", "b", "c"], ["b^2 - a*c"]), 3) == [1, 3, 5, 7]


def test_weighted_hilbert_window():
    R = ring(["a", "b"], ["a^3 - b^2"], weights=[2, 3])
    assert list(R.hilbert_window(0, 7).values()) == [1, 0, 1, 1, 1, 1, 1, 1]


def test_minimal_generators_drop_redundancy():
    R = ring(["x", "y"])
    M = GradedModule(R, [0, 1, 1], [poly_to_elem(R.parse("x")) | {(1, 0, 0): QQ(-1)}])
    assert minimal_generators(M) == [0, 1]


def test_matlis_dual_of_fat_point():
    R = ring(["x", "y"], ["x^2", "x*y", "y^2"])
    omega = canonical_module(R)
    assert minimal_generators(omega.module) == [-1, -1]
    assert omega.module.hilbert_window(-1, 0) == {-1: 2, 0: 1}


def test_inhomogeneous_relation_rejected():
    R = ring(["x", "y"])
    with pytest.raises(NotHomogeneous):
        GradedModule(R, [0], [poly_to_elem(R.parse("x + y^2"))])


def test_top_ext_of_residue_field_over_a_plane():
    R = ring(["x", "y"])
    assert ext_dims(residue(R), R.free([0]), 2, -3, 1) == {-3: 0, -2: 1, -1: 0, 0: 0, 1: 0}


def test_maximal_ideal_is_reflexive_over_a_plane():
    R = ring(["x", "y"])
    m = GradedModule(R, [1, 1], [{(0, 0, 1): QQ(1), (1, 1, 0): QQ(-1)}])
    H = HomModule(m, R.free([0])).module
    assert {k: H.dim(k) for k in range(-1, 3)} == {k: R.hilbert(k) for k in range(-1, 3)}


@pytest.mark.parametrize("R", FIXTURES[2:5], ids=repr)
@pytest.mark.parametrize("i", [0, 1, 2])
def test_ext_module_matches_ext_dimensions(R, i):
    M = cyclic(R, [str(R.names[0])])
    N = R.free([1])
    dims, module = ext(M, N, i, (-3, 2))
    assert dims == ext_dims(M, N, i, -3, 2)
    assert {k: module.dim(k) for k in range(-3, 3)} == dims


def test_ext_module_needs_a_rank_one_free_target():
    R = ring(["x"])
    dims, module = ext(residue(R), residue(R), 0, (0, 0))
    assert dims == {0: 1} and module is None
