"""Toric varieties of complete simplicial fans: class group, Mori and nef cones, morphisms, pullbacks."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from toridyn.errors import InputError, UnsupportedGeometryError
from toridyn.geometry.cones import Fan, Wall, is_complete, is_simplicial, simplicial_coordinates, walls
from toridyn.geometry.feasibility import find_point
from toridyn.geometry.lattice import (
    LatticeMap,
    Matrix,
    hermite_normal_form,
    integer_kernel,
    invariant_factors,
    is_integral,
    matmul,
    matpow,
    normalize_entries,
    nullspace,
    primitive,
    primitive_rational,
    rank,
    smith_normal_form,
    transpose,
)
from toridyn.geometry.polynomial import IntPolynomial, char_poly_coeffs


@dataclass(frozen=True)
class ToricVariety:
    """Class-group and cone data of a complete simplicial projective toric variety.

    ``ray_to_class`` sends D_rho to its class in the free part of Cl(X) (columns
    indexed by ``fan.rays``); ``class_lift`` is an integer right inverse of it.
    Curve classes live in the dual coordinates, paired with classes by dot product.
    """

    fan: Fan
    class_rank: int
    ray_to_class: Matrix
    class_lift: Matrix
    torsion: tuple[int, ...]
    walls: tuple[Wall, ...] = field(repr=False)
    wall_classes: tuple[tuple[int, ...], ...] = field(repr=False)
    mori_generators: tuple[tuple[int, ...], ...]
    nef_rays: tuple[tuple[int, ...], ...]

    @property
    def dim(self) -> int:
        return self.fan.rank

    def is_point(self) -> bool:
        return self.fan.rank == 0

    def divisor_class(self, coefficients: Sequence) -> tuple:
        """Class of the torus-invariant divisor sum a_rho D_rho."""
        return tuple(sum(q * a for q, a in zip(row, coefficients)) for row in self.ray_to_class)

    def ray_class(self, i: int) -> tuple[int, ...]:
        return tuple(row[i] for row in self.ray_to_class)

    def pair(self, curve: Sequence, cls: Sequence):
        return sum(a * b for a, b in zip(curve, cls))

    def is_ample(self, cls: Sequence) -> bool:
        return all(self.pair(z, cls) > 0 for z in self.mori_generators)

    def is_nef(self, cls: Sequence) -> bool:
        return all(self.pair(z, cls) >= 0 for z in self.mori_generators)


@dataclass(frozen=True)
class CanonicalClass:
    vector: tuple


@dataclass(frozen=True)
class ToricMorphism:
    source: ToricVariety
    target: ToricVariety
    lattice_map: LatticeMap
    surjective: bool

    def is_endomorphism(self) -> bool:
        return self.source.fan == self.target.fan

    def power(self, n: int) -> "ToricMorphism":
        if not self.is_endomorphism():
            raise InputError("only endomorphisms have powers")
        return ToricMorphism(self.source, self.target, self.lattice_map.power(n), self.surjective)

    def compose(self, other: "ToricMorphism") -> "ToricMorphism":
        """``self ∘ other``."""
        if other.target.fan != self.source.fan:
            raise InputError("morphisms are not composable")
        return ToricMorphism(other.source, self.target, self.lattice_map.compose(other.lattice_map),
                             self.surjective and other.surjective)


@dataclass(frozen=True)
class PullbackAction:
    """Exact matrix of f^* on the free class lattice.

    ``char_polynomial`` is the primitive integer polynomial with the same roots as
    det(xI - matrix); it is monic whenever ``matrix`` is integral.
    """

    matrix: Matrix
    char_polynomial: IntPolynomial
    denominator: int

    @classmethod
    def from_matrix(cls, m: Sequence[Sequence]) -> "PullbackAction":
        m = normalize_entries(tuple(tuple(Fraction(x) for x in row) for row in m))
        den = 1
        for row in m:
            for x in row:
                d = Fraction(x).denominator
                den = den * d // _gcd(den, d)
        return cls(m, IntPolynomial.from_rational(char_poly_coeffs(m)), den)

    @property
    def size(self) -> int:
        return len(self.matrix)

    @property
    def scaled_integer_matrix(self) -> Matrix:
        return tuple(tuple(int(x * self.denominator) for x in row) for row in self.matrix)

    def is_integral(self) -> bool:
        return self.denominator == 1

    def power(self, n: int) -> "PullbackAction":
        return PullbackAction.from_matrix(matpow(self.matrix, n))


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


# --- construction ----------------------------------------------------------


def _point_variety(fan: Fan) -> ToricVariety:
    return ToricVariety(fan, 0, (), (), (), (), (), (), ())


def build_variety(fan: Fan) -> ToricVariety:
    """Class group, wall curves, Mori generators and nef rays of a complete simplicial projective fan."""
    if fan.rank == 0:
        return _point_variety(fan)
    if not is_complete(fan):
        raise UnsupportedGeometryError("fan is not complete")
    if not is_simplicial(fan):
        raise UnsupportedGeometryError("fan is not simplicial (variety not Q-factorial)")
    n, r = fan.rank, len(fan.rays)
    b = fan.rays  # r x n ray matrix
    torsion = tuple(d for d in invariant_factors(b, n) if d > 1)
    relations = integer_kernel(transpose(b, n), r)  # q with sum q_rho u_rho = 0
    q = hermite_normal_form(relations)
    rho = len(q)
    if rho != r - n:
        raise UnsupportedGeometryError("rays do not span the lattice")
    u, _, v = smith_normal_form(q, r)
    lift = matmul(tuple(row[:rho] for row in v), u)
    wall_list = tuple(walls(fan))
    lt = transpose(lift, rho)
    wall_classes = tuple(tuple(sum(a * c for a, c in zip(row, w.relation)) for row in lt) for w in wall_list)
    mori = tuple(sorted(set(wall_classes)))
    nef = _dual_rays(mori, rho)
    if find_point(rho, gt=[(z, 0) for z in mori]) is None:
        raise UnsupportedGeometryError("nef cone has empty interior: fan is not projective")
    return ToricVariety(fan, rho, q, lift, torsion, wall_list, wall_classes, mori, nef)


def _dual_rays(generators: Sequence[Sequence[int]], dim: int) -> tuple[tuple[int, ...], ...]:
    """Extremal rays of the dual of cone(generators), assuming the dual is pointed and full-dimensional."""
    gens = [tuple(g) for g in generators if any(g)]
    out = set()
    if dim == 1:
        if all(g[0] > 0 for g in gens):
            out.add((1,))
        if all(g[0] < 0 for g in gens):
            out.add((-1,))
        return tuple(sorted(out))
    for sub in combinations(sorted(set(gens)), dim - 1):
        if rank(sub, dim) != dim - 1:
            continue
        normal = nullspace(sub, dim)[0]
        vals = [sum(a * b for a, b in zip(normal, g)) for g in gens]
        if all(x >= 0 for x in vals):
            out.add(primitive_rational(normal))
        elif all(x <= 0 for x in vals):
            out.add(primitive_rational([-x for x in normal]))
    return tuple(sorted(out))


def canonical_class(x: ToricVariety) -> CanonicalClass:
    return CanonicalClass(x.divisor_class([-1] * len(x.fan.rays)))


def wall_curve_class(x: ToricVariety, wall: Wall) -> tuple[int, ...]:
    try:
        i = x.walls.index(wall)
    except ValueError:
        raise InputError("wall does not belong to this variety") from None
    return x.wall_classes[i]


def intersect_wall_curve(x: ToricVariety, wall: Wall, class_vector: Sequence) -> Fraction:
    """Intersection number of a divisor class with the torus-invariant curve of a wall."""
    z = wall_curve_class(x, wall)
    return Fraction(x.pair(z, class_vector))


# --- morphisms ----------------------------------------------------------------


def _as_variety(obj) -> ToricVariety:
    if isinstance(obj, ToricVariety):
        return obj
    if isinstance(obj, Fan):
        return build_variety(obj)
    raise InputError(f"expected a fan or toric variety, got {type(obj).__name__}")


def validate_morphism(lattice_map, source, target, require_surjective: bool = False) -> ToricMorphism:
    """Check that every source cone lands in a target cone; records rational surjectivity."""
    src, tgt = _as_variety(source), _as_variety(target)
    if not isinstance(lattice_map, LatticeMap):
        lattice_map = LatticeMap.from_rows(lattice_map) if lattice_map else LatticeMap(src.dim, tgt.dim, ())
    if lattice_map.source_rank != src.dim or lattice_map.target_rank != tgt.dim:
        raise InputError(
            f"lattice map is {lattice_map.target_rank}x{lattice_map.source_rank}, "
            f"fans have ranks {src.dim} -> {tgt.dim}"
        )
    for cone in src.fan.cones:
        images = [lattice_map(src.fan.rays[i]) for i in cone]
        if tgt.dim and not _lands_in_one_cone(tgt.fan, images):
            raise InputError(
                f"image of cone {[list(src.fan.rays[i]) for i in cone]} lies in no single target cone"
            )
    surjective = tgt.dim == 0 or lattice_map.is_rationally_surjective()
    if require_surjective and not surjective:
        raise InputError("lattice map is not rationally surjective")
    return ToricMorphism(src, tgt, lattice_map, surjective)


def _lands_in_one_cone(fan: Fan, vectors: Sequence[Sequence[int]]) -> bool:
    nonzero = [v for v in vectors if any(v)]
    if not nonzero:
        return True
    total = tuple(sum(col) for col in zip(*nonzero))
    # the image cone lies in a cone of a fan iff the cone containing the sum of generators contains each generator
    hit = simplicial_coordinates(fan, total)
    if hit is None:
        return False
    cone = fan.cones[hit[0]]
    allowed = {fan.rays[i] for i in cone}
    for v in nonzero:
        res = simplicial_coordinates(fan, v)
        if res is None:
            return False
        ci, coeffs = res
        support = {fan.rays[j] for j, c in zip(fan.cones[ci], coeffs) if c}
        if not support <= allowed:
            return False
    return True


def divisor_pullback_matrix(lattice_map: LatticeMap, source_fan: Fan, target_fan: Fan) -> Matrix:
    """Rational matrix P with f^* D_tau = sum_rho P[rho][tau] D_rho on torus-invariant divisors."""
    r_src, r_tgt = len(source_fan.rays), len(target_fan.rays)
    out = [[Fraction(0)] * r_tgt for _ in range(r_src)]
    if target_fan.rank == 0:
        return tuple(tuple(row) for row in out)
    for rho, u in enumerate(source_fan.rays):
        image = lattice_map(u)
        if not any(image):
            continue
        hit = simplicial_coordinates(target_fan, image)
        if hit is None:
            raise InputError(f"image of ray {list(u)} is not in the target fan support")
        ci, coeffs = hit
        for tau, c in zip(target_fan.cones[ci], coeffs):
            out[rho][tau] = Fraction(c)
    return tuple(tuple(row) for row in out)


def class_pullback_matrix(morphism: ToricMorphism) -> Matrix:
    """Matrix of f^*: Cl(target) -> Cl(source) in the free class coordinates (rational entries)."""
    src, tgt = morphism.source, morphism.target
    if tgt.class_rank == 0:
        return tuple(() for _ in range(src.class_rank))
    p = divisor_pullback_matrix(morphism.lattice_map, src.fan, tgt.fan)
    m = matmul(matmul(src.ray_to_class, p), tgt.class_lift)
    return normalize_entries(m)


def pullback(morphism: ToricMorphism) -> PullbackAction:
    if not morphism.is_endomorphism():
        raise InputError("pullback action is defined for endomorphisms only")
    if not morphism.surjective:
        raise InputError("pullback action needs a surjective endomorphism")
    return PullbackAction.from_matrix(class_pullback_matrix(morphism))


def pullback_is_integral(action: PullbackAction) -> bool:
    return is_integral(action.matrix)
