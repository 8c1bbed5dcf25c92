from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from toridyn.errors import InputError
from toridyn.geometry.lattice import (
    LatticeMap,
    adapted_basis,
    det,
    hermite_normal_form,
    identity,
    integer_kernel,
    inverse,
    invariant_factors,
    matmul,
    matpow,
    matvec,
    nullspace,
    primitive,
    primitive_rational,
    rank,
    saturation,
    smith_normal_form,
    solve,
)

small = st.integers(-6, 6)


@st.composite
def int_matrices(draw, max_rows=4, max_cols=4):
    r = draw(st.integers(1, max_rows))
    c = draw(st.integers(1, max_cols))
    return tuple(tuple(draw(small) for _ in range(c)) for _ in range(r)), c


@st.composite
def square(draw, max_n=4):
    n = draw(st.integers(1, max_n))
    return tuple(tuple(draw(small) for _ in range(n)) for _ in range(n))


@given(int_matrices())
def test_smith_form_identity_and_divisibility(mc):
    m, c = mc
    u, d, v = smith_normal_form(m, c)
    assert matmul(matmul(u, m), v) == d
    assert abs(det(u)) == 1 and abs(det(v)) == 1
    diag = [d[i][i] for i in range(min(len(d), c))]
    assert all(x >= 0 for x in diag)
    nonzero = [x for x in diag if x]
    assert all(b % a == 0 for a, b in zip(nonzero, nonzero[1:]))
    assert all(d[i][j] == 0 for i in range(len(d)) for j in range(c) if i != j)


@given(int_matrices())
def test_rank_matches_numpy(mc):
    m, c = mc
    assert rank(m, c) == np.linalg.matrix_rank(np.array(m, dtype=float))


@given(square())
def test_det_matches_numpy(m):
    assert abs(det(m) - np.linalg.det(np.array(m, dtype=float))) < 1e-6


@given(square())
def test_inverse(m):
    if det(m) == 0:
        return
    assert matmul(m, inverse(m)) == identity(len(m))


@given(int_matrices())
def test_integer_kernel_is_saturated_basis(mc):
    m, c = mc
    ker = integer_kernel(m, c)
    assert len(ker) == c - rank(m, c)
    for k in ker:
        assert not any(matvec(m, k))
    if ker:
        # a Z-basis of a saturated lattice has trivial invariant factors
        assert all(x == 1 for x in invariant_factors(tuple(ker), c))


@given(int_matrices())
def test_hnf_spans_same_row_lattice(mc):
    m, c = mc
    h = hermite_normal_form(m)
    assert len(h) == rank(m, c)

    def nonzero(x):
        return tuple(d for d in invariant_factors(x, c) if d) if x else ()

    # same lattice: stacking either onto the other changes no invariant factor
    assert nonzero(h) == nonzero(m) == nonzero(tuple(h) + tuple(m))
    for i, row in enumerate(h):
        lead = next(j for j, x in enumerate(row) if x)
        assert row[lead] > 0
        assert all(r[lead] == 0 for r in h[i + 1:])
        assert all(0 <= r[lead] < row[lead] for r in h[:i])


def test_hnf_frozen_example():
    assert hermite_normal_form(((2, 4, 4), (-6, 6, 12), (10, -4, -16))) == ((2, 4, 4), (0, 6, 0), (0, 0, 12))


def test_invariant_factors_frozen():
    assert invariant_factors(((2, 4, 4), (-6, 6, 12), (10, -4, -16))) == (2, 6, 12)


def test_saturation_and_adapted_basis():
    sat = saturation([(2, 2, 0)], 3)
    assert sat == [(1, 1, 0)] or sat == [(-1, -1, 0)]
    w, winv = adapted_basis(sat, 3)
    assert matmul(w, winv) == identity(3)
    assert tuple(row[0] for row in w) in {(1, 1, 0), (-1, -1, 0)}
    with pytest.raises(InputError):
        adapted_basis([(2, 2, 0)], 3)


def test_nullspace_and_solve():
    ns = nullspace(((1, 2, 3),), 3)
    assert len(ns) == 2
    assert solve(((1, 1), (1, -1)), (3, 1), 2) == (Fraction(2), Fraction(1))
    assert solve(((1, 1), (1, 1)), (1, 2), 2) is None


def test_primitive_vectors():
    assert primitive((4, -6, 0)) == (2, -3, 0)
    assert primitive((0, 0)) == (0, 0)
    assert primitive_rational((Fraction(1, 2), Fraction(-1, 3))) == (3, -2)


def test_lattice_map_algebra():
    f = LatticeMap.from_rows(((2, 1), (0, 1)))
    assert f((1, 1)) == (3, 1)
    assert f.power(3).matrix == matpow(f.matrix, 3)
    assert f.compose(LatticeMap.identity(2)) == f
    assert LatticeMap.dilation(2, 3).matrix == ((3, 0), (0, 3))
    assert LatticeMap.from_rows(((1, 0),)).is_rationally_surjective()
    assert not LatticeMap.from_rows(((1, 0), (2, 0))).is_rationally_surjective()
    with pytest.raises(InputError):
        LatticeMap(2, 2, ((1, 0),))
    with pytest.raises(InputError):
        LatticeMap(1, 1, ((Fraction(1, 2),),))
