import pytest

from toridyn.corpus import blowup_p2, flip_threefold, hirzebruch, product, projective_space
from toridyn.errors import BranchCapExceeded, InputError, UnsupportedGeometryError
from toridyn.mmp import (
    DIVISORIAL,
    FIBERING,
    FLIPPING,
    contract,
    descend,
    equivariance_holds,
    extremal_rays,
    k_negative_rays,
    primordial_degrees,
    ray_permutation,
    run_mmp,
    toric_flip,
)
from toridyn.toric import build_variety, validate_morphism

P1P1 = build_variety(product(projective_space(1), projective_space(1)))
F1 = build_variety(blowup_p2())


def _f(x, m):
    return validate_morphism(m, x, x, require_surjective=True)


def test_extremal_rays_of_surfaces():
    assert sorted(r.kind for r in extremal_rays(P1P1)) == [FIBERING, FIBERING]
    assert all(r.k_negative for r in extremal_rays(P1P1))
    kinds = sorted(r.kind for r in extremal_rays(F1))
    assert kinds == [DIVISORIAL, FIBERING]
    f2 = build_variety(hirzebruch(2))
    div = [r for r in extremal_rays(f2) if r.kind == DIVISORIAL]
    assert div and not div[0].k_negative
    assert [r.kind for r in k_negative_rays(f2)] == [FIBERING]


def test_flip_ray_of_threefold():
    x = build_variety(flip_threefold())
    flips = [r for r in k_negative_rays(x) if r.kind == FLIPPING]
    assert len(flips) == 1
    assert flips[0].curve_class == (0, 0, 1)
    assert flips[0].relation == (0, 0, 2, 2, -1, -1)


def test_flip_of_a_surface_is_impossible():
    (div,) = [r for r in extremal_rays(F1) if r.kind == DIVISORIAL]
    with pytest.raises(UnsupportedGeometryError):
        toric_flip(F1, div)


def test_contract_rejects_k_positive_rays():
    f2 = build_variety(hirzebruch(2))
    (div,) = [r for r in extremal_rays(f2) if r.kind == DIVISORIAL]
    with pytest.raises(InputError, match="not K-negative"):
        contract(f2, div)


def test_divisorial_contraction_of_f1_gives_p2():
    (div,) = [r for r in extremal_rays(F1) if r.kind == DIVISORIAL]
    skel = contract(F1, div)
    assert skel.result.fan == projective_space(2)


def test_swap_descends_at_second_power():
    f = _f(P1P1, ((0, 2), (2, 0)))
    perm = ray_permutation(f, P1P1)
    assert all(perm[z] != z for z in perm)
    step = descend(f, contract(P1P1, extremal_rays(P1P1)[0]))
    assert step.iterate_exponent == 2
    assert step.descended_map.lattice_map.matrix == ((4,),)
    assert equivariance_holds(step)


def test_primordial_degrees_examples():
    f = _f(P1P1, ((2, 0), (0, 3)))
    traces = run_mmp(P1P1, f)
    assert len(traces) == 2 and all(t.tractable for t in traces)
    p = primordial_degrees(P1P1, f, traces)
    assert p.under == 2 and p.over == 3 and not p.infinite
    ident = primordial_degrees(F1, _f(F1, ((1, 0), (0, 1))))
    assert ident.under == ident.over == 1


def test_trace_flags():
    traces = run_mmp(F1, _f(F1, ((2, 0), (0, 2))))
    kinds = sorted(tuple(s.kind for s in t.steps) for t in traces)
    assert kinds == [(DIVISORIAL, FIBERING), (FIBERING, FIBERING)]
    for t in traces:
        fib_last_only = [s.kind for s in t.steps].count(FIBERING) == 1
        assert t.standard == fib_last_only
        assert t.endpoint.is_point() and t.endpoint_note == "point"
        assert t.per_step_degrees[0][0] == 2


def test_strategies_and_branch_cap():
    x = build_variety(flip_threefold())
    f = _f(x, ((2, 0, 0), (0, 2, 0), (0, 0, 2)))
    assert len(run_mmp(x, f)) == 6
    first = run_mmp(x, f, strategy="first_ray")
    assert len(first) == 1 and first[0].tractable
    guided = run_mmp(x, f, strategy="guided", choices=(1,))
    assert len(guided) == 1
    with pytest.raises(BranchCapExceeded) as err:
        run_mmp(x, f, branch_cap=3)
    assert len(err.value.partial) == 3
    with pytest.raises(InputError):
        run_mmp(x, f, strategy="random")


def test_flip_trace_equivariance():
    x = build_variety(flip_threefold())
    f = _f(x, ((3, 0, 0), (0, 3, 0), (0, 0, 3)))
    traces = run_mmp(x, f)
    assert any(s.kind == FLIPPING for t in traces for s in t.steps)
    assert all(equivariance_holds(s) for t in traces for s in t.steps)
