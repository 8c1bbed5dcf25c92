"""Positive entropy of lattice automorphisms preserving a finitely generated cone.

Everything here analyzes the linear action on the class lattice only; whether a
matrix is realized by an automorphism of an actual variety is not checked.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from math import gcd
from typing import Optional, Sequence, Union

from toridyn.dynamics import matrix_order
from toridyn.errors import BranchCapExceeded, InputError, ToridynError
from toridyn.geometry.algebraic import AlgebraicNumber, dominant_root
from toridyn.geometry.cones import Fan, RationalCone
from toridyn.geometry.lattice import (
    Matrix,
    as_matrix,
    det,
    identity,
    inverse,
    is_integral,
    matmul,
    matpow,
    matvec,
    normalize_entries,
    primitive,
)
from toridyn.geometry.polynomial import char_poly, kronecker_all_roots_unit
from toridyn.toric import ToricVariety, build_variety, pullback, validate_morphism

IRRATIONAL = "irrational"
MODEL_NOTE = "linear-action model: realizability by an automorphism of a variety is not checked"
DEFAULT_CLOSURE_CAP = 100_000


class EntropyCrossCheckError(ToridynError):
    """The eigenvalue test and the finite-order test disagree; ``report`` holds both answers."""

    exit_code = 2

    def __init__(self, message, report):
        super().__init__(message)
        self.report = report


@dataclass(frozen=True)
class ConePreservingAuto:
    """Integer matrix acting on a lattice, optionally with the rational cone it preserves.

    ``preserved_cone`` is the ray list of a rational cone (kept in the given order,
    which fixes the order of ray scalings), a RationalCone, the marker ``IRRATIONAL``,
    or None.  Only an invertible matrix is required here; ``positive_entropy``
    insists on |det| = 1.
    """

    matrix: Matrix
    preserved_cone: Union[tuple, RationalCone, str, None] = None

    def __post_init__(self):
        m = as_matrix(self.matrix)
        if any(len(row) != len(m) for row in m):
            raise InputError("automorphism matrix must be square")
        if not is_integral(m):
            raise InputError("automorphism matrix must be integral")
        m = normalize_entries(m)
        if m and det(m) == 0:
            raise InputError("automorphism matrix is singular")
        cone = self.preserved_cone
        if isinstance(cone, str) and cone != IRRATIONAL:
            raise InputError(f"unknown cone marker {cone!r}")
        if isinstance(cone, RationalCone):
            cone = cone.rays
        if cone is not None and not isinstance(cone, str):
            cone = tuple(tuple(int(x) for x in r) for r in cone)
            RationalCone(len(m), cone)  # validates primitivity and irredundancy
            object.__setattr__(self, "preserved_cone", cone)
        object.__setattr__(self, "matrix", m)

    @property
    def rank(self) -> int:
        return len(self.matrix)

    @property
    def rational_cone(self) -> Optional[tuple]:
        """Rays of the preserved rational cone, or None."""
        return self.preserved_cone if isinstance(self.preserved_cone, tuple) else None

    def compose(self, other: "ConePreservingAuto") -> "ConePreservingAuto":
        """``self ∘ other``; both must carry the same cone."""
        if self.preserved_cone != other.preserved_cone:
            raise InputError("automorphisms preserve different cones")
        return ConePreservingAuto(matmul(self.matrix, other.matrix), self.preserved_cone)

    def power(self, n: int) -> "ConePreservingAuto":
        return ConePreservingAuto(matpow(self.matrix, n), self.preserved_cone)


@dataclass(frozen=True)
class RayPermutation:
    """``matrix * rays[i] = scalings[i] * rays[images[i]]``."""

    images: tuple[int, ...]
    scalings: tuple[Fraction, ...]

    @property
    def order(self) -> int:
        out = 1
        for i in range(len(self.images)):
            n, j = 1, self.images[i]
            while j != i:
                j = self.images[j]
                n += 1
            out = out * n // gcd(out, n)
        return out

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.images))


@dataclass(frozen=True)
class EntropyReport:
    lambda1: AlgebraicNumber
    positive_entropy: bool
    infinite_order_in_action: bool
    d1: Optional[int] = None
    lin_diagonal: Optional[tuple[AlgebraicNumber, ...]] = None
    note: str = MODEL_NOTE


@dataclass(frozen=True)
class DXData:
    d1: int
    d2_bound: int
    d: int
    generators: tuple[ConePreservingAuto, ...]
    provenance: tuple[str, ...] = ()


def _positive_ratio(image: Sequence, ray: Sequence) -> Optional[Fraction]:
    """t > 0 with image = t * ray, else None."""
    k = next(i for i, x in enumerate(ray) if x)
    t = Fraction(image[k], ray[k])
    if t <= 0 or any(Fraction(a) != t * b for a, b in zip(image, ray)):
        return None
    return t


def ray_permutation(auto: ConePreservingAuto) -> RayPermutation:
    rays = auto.rational_cone
    if rays is None:
        raise InputError("ray permutation needs a rational preserved cone")
    position = {r: i for i, r in enumerate(rays)}
    images, scalings = [], []
    for r in rays:
        v = matvec(auto.matrix, r)
        target = primitive(v) if any(v) else None
        j = position.get(target)
        t = None if j is None else _positive_ratio(v, rays[j])
        if t is None:
            raise InputError(f"matrix sends ray {list(r)} to {list(v)}, not a positive multiple of a cone ray")
        images.append(j)
        scalings.append(t)
    if len(set(images)) != len(rays):
        raise InputError("matrix does not permute the cone rays")
    return RayPermutation(tuple(images), tuple(scalings))


def _infinite_order_by_rays(auto: ConePreservingAuto, perm: RayPermutation) -> bool:
    """Raise to the permutation order; the result scales each ray, and has finite order iff all scalings are 1."""
    k = perm.order
    fixed = ConePreservingAuto(matpow(auto.matrix, k), auto.preserved_cone)
    scal = ray_permutation(fixed).scalings
    if all(s == 1 for s in scal):
        # rays span, so fixing every ray means the identity
        if fixed.matrix != identity(auto.rank):
            raise InputError("cone rays do not span the lattice")
        return False
    return True


def positive_entropy(auto: ConePreservingAuto) -> EntropyReport:
    """Decide lambda1 > 1 twice: Kronecker on the characteristic polynomial, and finite order of the action."""
    if auto.rank == 0:
        return EntropyReport(AlgebraicNumber.from_rational(1), False, False, 1 if auto.rational_cone is not None else None)
    if abs(det(auto.matrix)) != 1:
        raise InputError("positive_entropy needs a unimodular matrix (|det| = 1)")
    p = char_poly(auto.matrix)
    lam = dominant_root(p)
    positive = not kronecker_all_roots_unit(p)
    d1 = None
    lin = None
    if auto.rational_cone is not None:
        perm = ray_permutation(auto)
        d1 = perm.order
        infinite = _infinite_order_by_rays(auto, perm)
        if perm.is_identity():
            lin = tuple(AlgebraicNumber.from_rational(s) for s in perm.scalings)
    else:
        infinite = matrix_order(auto.matrix) is None
    report = EntropyReport(lam, positive, infinite, d1, lin)
    if positive != infinite:
        raise EntropyCrossCheckError(
            "eigenvalue test and finite-order test disagree: the matrix preserves no "
            "finitely generated cone whose rays it permutes",
            report,
        )
    return report


def _compose_perm(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(a[b[i]] for i in range(len(b)))


def permutation_group_order(gens: Sequence[tuple[int, ...]], n: int, cap: int = DEFAULT_CLOSURE_CAP) -> int:
    """Size of the permutation group generated by ``gens`` (closure enumeration)."""
    ident = tuple(range(n))
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for g in frontier:
            for s in gens:
                h = _compose_perm(s, g)
                if h not in seen:
                    seen.add(h)
                    if len(seen) > cap:
                        raise BranchCapExceeded(f"permutation group closure exceeded {cap} elements")
                    nxt.append(h)
        frontier = nxt
    return len(seen)


def dx_membership_data(
    autos: Sequence[ConePreservingAuto], d2_bound: int = 1, cap: int = DEFAULT_CLOSURE_CAP
) -> DXData:
    """d1 = size of the ray-permutation image, d = lcm(d1, d2_bound), generators = 2d-th powers."""
    if not autos:
        raise InputError("need at least one automorphism")
    if d2_bound < 1:
        raise InputError("d2_bound must be a positive integer")
    cones = {a.preserved_cone for a in autos}
    if len(cones) != 1 or autos[0].rational_cone is None:
        raise InputError("all automorphisms must preserve the same rational cone")
    n = len(autos[0].rational_cone)
    d1 = permutation_group_order([ray_permutation(a).images for a in autos], n, cap)
    d = d1 * d2_bound // gcd(d1, d2_bound)
    prov = (f"d1: permutation image of order {d1}", f"d2_bound: {d2_bound} (annotation)")
    return DXData(d1, d2_bound, d, tuple(a.power(2 * d) for a in autos), prov)


def lin_map(element: ConePreservingAuto) -> tuple[AlgebraicNumber, ...]:
    """Ray scalings of an element that fixes every ray of its cone."""
    perm = ray_permutation(element)
    if not perm.is_identity():
        raise InputError("element permutes the cone rays nontrivially, so it is not a diagonal element")
    return tuple(AlgebraicNumber.from_rational(s) for s in perm.scalings)


# --- automorphisms coming from fans ---------------------------------------------------


def fan_symmetries(fan: Fan) -> list[Matrix]:
    """All lattice automorphisms permuting the rays and the maximal cones of a complete simplicial fan."""
    n = fan.rank
    if n == 0:
        return [()]
    base = next(c for c in fan.cones if len(c) == n)
    base_rays = [fan.rays[i] for i in base]
    b_inv = inverse(tuple(tuple(r[k] for r in base_rays) for k in range(n)))
    rays = set(fan.rays)
    cones = {frozenset(fan.rays[i] for i in c) for c in fan.cones}
    out = set()
    for c in fan.cones:
        for order in permutations(c):
            cols = tuple(tuple(fan.rays[i][k] for i in order) for k in range(n))
            m = normalize_entries(matmul(cols, b_inv))
            if not is_integral(m) or abs(det(m)) != 1:
                continue
            if {matvec(m, r) for r in fan.rays} != rays:
                continue
            if {frozenset(matvec(m, r) for r in cone) for cone in cones} != cones:
                continue
            out.add(m)
    return sorted(out)


def auto_from_fan_symmetry(x: ToricVariety, m: Matrix) -> ConePreservingAuto:
    """Pullback of a fan symmetry on the class lattice, with the nef cone as preserved cone."""
    action = pullback(validate_morphism(m, x, x, require_surjective=True))
    return ConePreservingAuto(action.matrix, x.nef_rays)


def fan_automorphisms(fan: Fan) -> list[ConePreservingAuto]:
    x = build_variety(fan)
    return [auto_from_fan_symmetry(x, m) for m in fan_symmetries(fan)]
