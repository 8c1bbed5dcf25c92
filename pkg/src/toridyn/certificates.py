"""Density certificates for pre-periodic points and difficulty-bound propagation along MMP traces."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence, Union

from toridyn.dynamics import matrix_order
from toridyn.errors import InputError
from toridyn.geometry.cones import Fan
from toridyn.geometry.lattice import LatticeMap, Matrix, identity, matmul, matpow, matvec, primitive, rank, scale
from toridyn.mmp import FIBERING, ContractionStep, MMPTrace
from toridyn.toric import ToricMorphism, ToricVariety, build_variety, pullback, validate_morphism

POLARIZED = "polarized"
IDENTITY = "identity"
OTHER = "other"

log = logging.getLogger(__name__)

DENSE = "dense"
UNKNOWN = "unknown"


@dataclass(frozen=True)
class FiberStructure:
    """Fiber of a fibering step: the subfan of cones inside (N0)_R, in coordinates of a basis of N0."""

    sublattice: tuple[tuple[int, ...], ...]
    fiber_fan: Fan
    fiber_variety: ToricVariety
    restricted_map: ToricMorphism


@dataclass(frozen=True)
class FiberClassification:
    """``kind`` describes the iterate ``restricted_map^iterate``: q-dilation (polarized) or identity."""

    kind: str
    q: Optional[Fraction] = None
    iterate: int = 1
    diagnostic: str = ""


@dataclass(frozen=True)
class DensityCertificate:
    verdict: str
    trace: MMPTrace
    per_fibering_evidence: tuple[tuple[int, FiberClassification], ...]


@dataclass(frozen=True)
class DifficultyBound:
    value: Union[int, str]
    provenance: tuple[str, ...] = ()

    @property
    def known(self) -> bool:
        return self.value != UNKNOWN


# --- fibers -----------------------------------------------------------------------


def fiber_structure(step: ContractionStep) -> FiberStructure:
    if step.kind != FIBERING:
        raise InputError(f"fiber_structure needs a fibering step, got {step.kind}")
    skel = step.skeleton
    fan = step.source.fan
    basis = skel.fiber_lattice
    coords = skel.fiber_coordinates
    k = len(basis)
    inside = [i for i, u in enumerate(fan.rays) if rank(tuple(basis) + (u,), fan.rank) == k]
    inside_set = set(inside)
    faces = {tuple(i for i in cone if i in inside_set) for cone in fan.cones}
    fiber_rays = [primitive(matvec(coords, fan.rays[i])) for i in inside]
    position = {i: j for j, i in enumerate(inside)}
    fiber_fan = Fan.from_data(k, fiber_rays, [[position[i] for i in face] for face in faces])
    fiber = build_variety(fiber_fan)
    phi = step.source_map.lattice_map.matrix
    basis_cols = tuple(tuple(basis[j][i] for j in range(k)) for i in range(fan.rank))
    restricted = LatticeMap(k, k, matmul(matmul(coords, phi), basis_cols))
    return FiberStructure(tuple(basis), fiber_fan, fiber, validate_morphism(restricted, fiber, fiber))


def _ray_cycle_order(m: Matrix, rays: Sequence[tuple]) -> Optional[int]:
    """Order of the permutation that m induces on rays (m u_i a positive multiple of u_j), or None."""
    images = {}
    for u in rays:
        v = primitive(matvec(m, u))
        if v not in rays or not any(matvec(m, u)):
            return None
        images[u] = v
    if len(set(images.values())) != len(rays):
        return None
    order = 1
    for u in rays:
        n, w = 1, images[u]
        while w != u:
            w = images[w]
            n += 1
        order = order * n // _gcd(order, n)
    return order


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def classify_pic1_endo(fiber: FiberStructure) -> FiberClassification:
    """Decide whether an iterate of the restricted map is a dilation v -> qv (q > 1) or the identity."""
    if fiber.fiber_variety.class_rank != 1:
        raise InputError(f"fiber has class rank {fiber.fiber_variety.class_rank}, expected 1")
    m = fiber.restricted_map.lattice_map.matrix
    k = len(m)
    order = _ray_cycle_order(m, fiber.fiber_fan.rays)
    if order is None:
        return _other("restricted map does not send rays to rays")
    mk = matpow(m, order)
    q = mk[0][0]
    if q > 0 and mk == scale(identity(k), q):
        if q == 1:
            return FiberClassification(IDENTITY, Fraction(1), order)
        return FiberClassification(POLARIZED, Fraction(q), order)
    return _other(f"iterate {order} is not a dilation", order)


def _other(diagnostic: str, iterate: int = 1) -> FiberClassification:
    # equivariant maps on a class-rank-1 fiber are always dilations up to iterate
    log.warning("fiber map is neither polarized nor identity (suspected input error): %s", diagnostic)
    return FiberClassification(OTHER, iterate=iterate, diagnostic=diagnostic)


def density_certificate(trace: MMPTrace) -> DensityCertificate:
    """Dense iff the trace ends at the point and every fibering step has polarized or identity fibers."""
    evidence = []
    for i, step in enumerate(trace.steps):
        if step.kind == FIBERING:
            evidence.append((i, classify_pic1_endo(fiber_structure(step))))
    ok = trace.tractable and all(c.kind in (POLARIZED, IDENTITY) for _, c in evidence)
    return DensityCertificate(DENSE if ok else UNKNOWN, trace, tuple(evidence))


# --- difficulty ---------------------------------------------------------------------


def _steps_of(trace) -> Sequence:
    return trace.steps if hasattr(trace, "steps") else trace


def propagate_difficulty(
    trace,
    base: Union[DifficultyBound, int, None],
    relative: Optional[Mapping[int, int]] = None,
) -> DifficultyBound:
    """Upper bound on the difficulty of the start of a trace, pulled back from the endpoint.

    Birational steps keep the bound; a fibering step adds the fiber dimension,
    except that a relative-difficulty-0 annotation adds nothing and a positive
    annotation k caps the bound at k when the base bound is 0.
    Steps only need ``kind``, ``source_dim`` and ``result_dim``.
    """
    relative = dict(relative or {})
    if base is None or (isinstance(base, DifficultyBound) and not base.known):
        return DifficultyBound(UNKNOWN, ("base-annotation: missing",))
    value = base.value if isinstance(base, DifficultyBound) else int(base)
    if value < 0:
        raise InputError("difficulty annotations are non-negative")
    prov = [f"base-annotation: {value}"]
    steps = list(_steps_of(trace))
    for i in range(len(steps) - 1, -1, -1):
        s = steps[i]
        if s.kind != FIBERING:
            prov.append(f"birational-invariance: step {i} ({s.kind})")
            continue
        drop = s.source_dim - s.result_dim
        ann = relative.get(i)
        if ann is not None and ann < 0:
            raise InputError("relative difficulty annotations are non-negative")
        if ann == 0:
            prov.append(f"relative-difficulty-0: step {i}")
        elif ann is not None and value == 0:
            value = min(ann, drop)
            prov.append(f"relative-difficulty-{ann}: step {i}, bound {value}")
        else:
            value = value + drop
            prov.append(f"fibering-bound: step {i}, +{drop} -> {value}")
    return DifficultyBound(value, tuple(prov))


def fibration_obstruction(trace: MMPTrace) -> bool:
    """A fibering step onto a positive-dimensional base where the descended map acts with finite order."""
    for step in trace.steps:
        if step.kind == FIBERING and step.result_dim > 0:
            if matrix_order(pullback(step.descended_map).matrix) is not None:
                return True
    return False
