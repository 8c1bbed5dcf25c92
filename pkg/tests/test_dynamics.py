from fractions import Fraction

from hypothesis import given, strategies as st

from toridyn.corpus import blowup_p2, endomorphisms, point, product, projective_space
from toridyn.dynamics import (
    amplified_obstruction,
    analyze,
    analyze_action,
    dynamical_degree,
    is_amplified,
    is_int_amplified,
    is_polarized,
    matrix_order,
)
from toridyn.geometry.lattice import matpow
from toridyn.toric import PullbackAction, build_variety, pullback, validate_morphism

P1P1 = build_variety(product(projective_space(1), projective_space(1)))


def _action(m):
    return PullbackAction.from_matrix(m)


def test_polarized_and_amplified_examples():
    pol = is_polarized(_action(((2, 0), (0, 2))), P1P1)
    assert pol.q == 2 and pol.witness == (1, 1)
    assert is_polarized(_action(((2, 0), (0, 3))), P1P1) is None
    assert is_amplified(_action(((2, 0), (0, 3))), P1P1) == (1, 1)
    p2 = build_variety(projective_space(2))
    rep = analyze(validate_morphism(((3, 0), (0, 3)), p2, p2))
    assert rep.polarization.q == 3 and rep.polarization.witness == (1,)
    assert rep.lambda1 == 3 and rep.is_int_amplified and rep.is_amplified


def test_obstruction_certificates():
    for m in (((2, 0), (0, 1)), ((1, 0), (0, 1))):
        a = _action(m)
        assert is_amplified(a, P1P1) is None
        y = amplified_obstruction(a, P1P1)
        assert y is not None and all(c >= 0 for c in y) and sum(y) == 1
        # the weighted curve pairs to zero with every f^*L - L
        curve = [sum(c * z[i] for c, z in zip(y, P1P1.mori_generators)) for i in range(2)]
        for j in range(2):
            col = [m[i][j] - (i == j) for i in range(2)]
            assert sum(c * v for c, v in zip(curve, col)) == 0


def test_identity_report():
    rep = analyze_action(_action(((1, 0), (0, 1))), P1P1)
    assert rep.lambda1 == 1 and rep.lambda1_approx == "1.0000000000"
    assert not rep.is_int_amplified and not rep.is_polarized and not rep.is_amplified


def test_point_has_degree_one_and_is_not_int_amplified():
    x = build_variety(point())
    f = validate_morphism((), x, x)
    a = pullback(f)
    assert dynamical_degree(a) == 1
    assert not is_int_amplified(a)


def test_corpus_int_amplified_iff_amplified():
    for name, fan, m in endomorphisms():
        x = build_variety(fan)
        rep = analyze(validate_morphism(m, x, x))
        assert rep.is_int_amplified == rep.is_amplified, name
        if rep.is_polarized:
            assert rep.is_int_amplified, name


def test_matrix_order():
    assert matrix_order(((0, 1), (1, 0))) == 2
    assert matrix_order(((0, -1), (1, -1))) == 3
    assert matrix_order(((1, 1), (0, 1))) is None
    assert matrix_order(((2, 1), (1, 1))) is None
    assert matrix_order(((Fraction(1, 2), 0), (0, 2))) is None
    assert matrix_order(()) == 1


@given(st.lists(st.sampled_from([((0, 1), (1, 0)), ((0, -1), (1, 0)), ((-1, 0), (0, 1))]),
                min_size=1, max_size=5))
def test_matrix_order_of_finite_group_words(word):
    m = ((1, 0), (0, 1))
    for g in word:
        m = tuple(tuple(sum(a * b for a, b in zip(r, c)) for c in zip(*g)) for r in m)
    k = matrix_order(m)
    assert k is not None and matpow(m, k) == ((1, 0), (0, 1))
    assert all(matpow(m, d) != ((1, 0), (0, 1)) for d in range(1, k))
