from fractions import Fraction

import pytest

from toridyn.corpus import blowup_p2, flip_threefold, hirzebruch, point, product, projective_space
from toridyn.errors import InputError, UnsupportedGeometryError
from toridyn.geometry.cones import Fan
from toridyn.geometry.lattice import matmul, rank
from toridyn.toric import (
    PullbackAction,
    build_variety,
    canonical_class,
    class_pullback_matrix,
    pullback,
    validate_morphism,
)

P1P1 = product(projective_space(1), projective_space(1))


def _relations_ok(x):
    """Rows of ray_to_class are exactly the linear relations among the rays."""
    rays = x.fan.rays
    for row in x.ray_to_class:
        assert all(sum(q * r[k] for q, r in zip(row, rays)) == 0 for k in range(x.dim))
    assert matmul(x.ray_to_class, x.class_lift) == tuple(
        tuple(int(i == j) for j in range(x.class_rank)) for i in range(x.class_rank))


@pytest.mark.parametrize("fan, rho", [
    (projective_space(1), 1), (projective_space(2), 1), (projective_space(3), 1),
    (P1P1, 2), (blowup_p2(), 2), (hirzebruch(2), 2), (flip_threefold(), 3),
])
def test_class_rank_and_relations(fan, rho):
    x = build_variety(fan)
    assert x.class_rank == rho == len(fan.rays) - fan.rank
    _relations_ok(x)
    assert x.is_ample(tuple(sum(c) for c in zip(*x.nef_rays)))
    assert rank(x.nef_rays, rho) == rho


def test_frozen_class_data():
    x = build_variety(P1P1)
    assert x.ray_to_class == ((1, 0, 0, 1), (0, 1, 1, 0))
    assert sorted(x.nef_rays) == [(0, 1), (1, 0)]
    assert canonical_class(x).vector == (-2, -2)
    f1 = build_variety(blowup_p2())
    assert f1.ray_to_class == ((1, 0, 0, 1), (0, 1, 1, -1))
    assert canonical_class(f1).vector == (-2, -1)
    assert canonical_class(build_variety(projective_space(2))).vector == (-3,)
    assert canonical_class(build_variety(projective_space(3))).vector == (-4,)


def test_torsion_in_class_group():
    # P^2 modulo mu_3: the rays span an index-3 sublattice
    fan = Fan.from_data(2, [(2, -1), (-1, 2), (-1, -1)], [[0, 1], [1, 2], [2, 0]])
    x = build_variety(fan)
    assert x.class_rank == 1 and x.torsion == (3,)


def test_unsupported_geometry():
    with pytest.raises(UnsupportedGeometryError, match="not complete"):
        build_variety(Fan.from_data(2, [(1, 0), (0, 1)], [[0, 1]]))
    square = Fan.from_data(3, [(1, 1, 1), (1, -1, 1), (-1, -1, 1), (-1, 1, 1),
                               (1, 1, -1), (1, -1, -1), (-1, -1, -1), (-1, 1, -1)],
                           [[0, 1, 2, 3], [4, 5, 6, 7], [0, 1, 4, 5], [1, 2, 5, 6], [2, 3, 6, 7], [3, 0, 7, 4]])
    with pytest.raises(UnsupportedGeometryError, match="simplicial"):
        build_variety(square)


def test_point_variety():
    x = build_variety(point())
    assert x.is_point() and x.class_rank == 0


def test_pullback_of_product_dilation():
    x = build_variety(P1P1)
    f = validate_morphism(((2, 0), (0, 3)), x, x)
    assert f.surjective
    assert pullback(f).matrix == ((2, 0), (0, 3))
    assert pullback(f).char_polynomial.coefficients == (1, -5, 6)


def test_pullback_of_swap_and_f1_dilation():
    x = build_variety(P1P1)
    assert pullback(validate_morphism(((0, 1), (1, 0)), x, x)).matrix == ((0, 1), (1, 0))
    f1 = build_variety(blowup_p2())
    assert pullback(validate_morphism(((2, 0), (0, 2)), f1, f1)).matrix == ((2, 0), (0, 2))


def test_non_surjective_and_non_toric_maps():
    x = build_variety(P1P1)
    proj = validate_morphism(((1, 0), (0, 0)), x, x)
    assert not proj.surjective
    with pytest.raises(InputError):
        pullback(proj)
    with pytest.raises(InputError, match="no single target cone"):
        validate_morphism(((1, 1), (0, 1)), x, x)
    with pytest.raises(InputError):
        validate_morphism(((1, 0),), x, x)


def test_morphism_to_a_lower_dimensional_target():
    x = build_variety(P1P1)
    p1 = build_variety(projective_space(1))
    f = validate_morphism(((1, 0),), x, p1)
    assert f.surjective and not f.is_endomorphism()
    assert class_pullback_matrix(f) == ((1,), (0,))


def test_rational_pullback_action():
    a = PullbackAction.from_matrix(((Fraction(1, 2), 0), (0, 2)))
    assert not a.is_integral() and a.denominator == 2
    assert a.scaled_integer_matrix == ((1, 0), (0, 4))
    assert a.power(2).matrix == ((Fraction(1, 4), 0), (0, 4))
