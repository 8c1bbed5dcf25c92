from fractions import Fraction

from hypothesis import given, strategies as st

from toridyn.geometry.feasibility import find_point, in_cone

small = st.integers(-4, 4)


def _holds(point, ge, gt, eq):
    dot = lambda a: sum(Fraction(x) * y for x, y in zip(a, point))  # noqa: E731
    return (all(dot(a) >= b for a, b in ge) and all(dot(a) > b for a, b in gt)
            and all(dot(a) == b for a, b in eq))


@st.composite
def systems_with_witness(draw):
    """Constraints built to hold at a random rational point, so the system is feasible."""
    n = draw(st.integers(1, 4))
    p = [Fraction(draw(small), draw(st.integers(1, 3))) for _ in range(n)]
    rows = lambda k: [tuple(draw(small) for _ in range(n)) for _ in range(k)]  # noqa: E731
    val = lambda a: sum(x * y for x, y in zip(a, p))  # noqa: E731
    ge = [(a, val(a) - draw(st.integers(0, 2))) for a in rows(draw(st.integers(0, 4)))]
    gt = [(a, val(a) - draw(st.integers(1, 2))) for a in rows(draw(st.integers(0, 4)))]
    eq = [(a, val(a)) for a in rows(draw(st.integers(0, 2)))]
    return n, ge, gt, eq


@given(systems_with_witness())
def test_feasible_systems_get_a_valid_point(system):
    n, ge, gt, eq = system
    pt = find_point(n, ge=ge, gt=gt, eq=eq)
    assert pt is not None
    assert _holds(pt, ge, gt, eq)


@given(st.integers(1, 4).flatmap(lambda n: st.tuples(st.just(n), st.lists(
    st.tuples(st.lists(small, min_size=n, max_size=n).map(tuple), small), max_size=5))))
def test_returned_points_satisfy_random_systems(data):
    n, rows = data
    pt = find_point(n, gt=rows)
    if pt is not None:
        assert _holds(pt, [], rows, [])


def test_infeasible_systems():
    assert find_point(1, gt=[((1,), 0), ((-1,), 0)]) is None
    assert find_point(1, ge=[((1,), 0), ((-1,), 0)]) == (Fraction(0),)
    assert find_point(2, eq=[((1, 1), 1), ((1, 1), 2)]) is None
    # strictness propagates through elimination: x > y, y > z, z >= x
    assert find_point(3, gt=[((1, -1, 0), 0), ((0, 1, -1), 0)], ge=[((-1, 0, 1), 0)]) is None


def test_in_cone():
    assert in_cone((1, 1), [(1, 0), (0, 1)])
    assert not in_cone((-1, 1), [(1, 0), (0, 1)])
    assert in_cone((0, 0), [])
    assert not in_cone((1, 0), [])
