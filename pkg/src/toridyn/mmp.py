"""Equivariant toric minimal model program.

Extremal rays of the Mori cone are read off wall curves; each K-negative ray is
contracted (fibering or divisorial) or flipped, and a power of the endomorphism
fixing the ray is pushed down to the new variety.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from toridyn.errors import BranchCapExceeded, InputError, UnsupportedGeometryError
from toridyn.geometry.algebraic import AlgebraicNumber
from toridyn.geometry.cones import Fan, RationalCone, is_complete, is_simplicial
from toridyn.geometry.lattice import (
    LatticeMap,
    Matrix,
    adapted_basis,
    matmul,
    matvec,
    primitive,
    rank,
    saturation,
    transpose,
)
from toridyn.toric import (
    ToricMorphism,
    ToricVariety,
    build_variety,
    canonical_class,
    class_pullback_matrix,
    pullback,
    validate_morphism,
)

FIBERING = "fibering"
DIVISORIAL = "divisorial"
FLIPPING = "flipping"

MAX_FLIPS = 64
DEFAULT_BRANCH_CAP = 256


@dataclass(frozen=True)
class ExtremalRay:
    """Extremal ray of the Mori cone: primitive curve class plus its primitive ray relation."""

    curve_class: tuple[int, ...]
    relation: tuple[int, ...]
    k_negative: bool
    kind: str

    @property
    def negative_rays(self) -> tuple[int, ...]:
        return tuple(i for i, c in enumerate(self.relation) if c < 0)

    @property
    def positive_rays(self) -> tuple[int, ...]:
        return tuple(i for i, c in enumerate(self.relation) if c > 0)


@dataclass(frozen=True)
class ContractionSkeleton:
    """Result of contracting or flipping a ray, before the endomorphism is pushed down.

    For fibering contractions ``fiber_lattice`` is a basis of the saturated sublattice
    N0, ``fiber_coordinates`` expresses vectors of N0 in that basis, and
    ``projection`` is the matrix of N -> N/N0 (``complement`` lifts N/N0 back).
    """

    kind: str
    ray: ExtremalRay
    source: ToricVariety
    result: ToricVariety
    projection: Matrix
    complement: Matrix = ()
    fiber_lattice: tuple[tuple[int, ...], ...] = ()
    fiber_coordinates: Matrix = ()


@dataclass(frozen=True)
class ContractionStep:
    kind: str
    ray: ExtremalRay
    source: ToricVariety
    result: ToricVariety
    iterate_exponent: int
    source_map: ToricMorphism  # the iterate f^n on the source
    descended_map: ToricMorphism
    contraction: Optional[ToricMorphism]  # None for flips
    skeleton: ContractionSkeleton = field(repr=False)

    @property
    def source_dim(self) -> int:
        return self.source.dim

    @property
    def result_dim(self) -> int:
        return self.result.dim


@dataclass(frozen=True)
class MMPTrace:
    steps: tuple[ContractionStep, ...]
    start_map: ToricMorphism
    endpoint: ToricVariety
    endpoint_map: ToricMorphism
    tractable: bool
    standard: bool
    per_step_degrees: tuple[tuple[int, AlgebraicNumber], ...]

    @property
    def endpoint_note(self) -> str:
        if self.endpoint.is_point():
            return "point"
        return "minimal, not certified Q-abelian"

    def stage_maps(self) -> list[ToricMorphism]:
        return [self.start_map] + [s.descended_map for s in self.steps]


@dataclass(frozen=True)
class PrimordialDegrees:
    under: Optional[AlgebraicNumber]
    over: Optional[AlgebraicNumber]
    witness_traces: tuple[Optional[MMPTrace], Optional[MMPTrace]]

    @property
    def infinite(self) -> bool:
        return self.under is None


# --- extremal rays ----------------------------------------------------------


def _kind(relation: Sequence[int]) -> str:
    neg = sum(1 for c in relation if c < 0)
    return FIBERING if neg == 0 else DIVISORIAL if neg == 1 else FLIPPING


def _relation_of_class(x: ToricVariety, z: Sequence[int]) -> tuple[int, ...]:
    # D_rho . C for every ray; proportional to the wall relation of any wall curve in the ray
    vals = [x.pair(z, x.ray_class(i)) for i in range(len(x.fan.rays))]
    return primitive(vals)


def _make_ray(x: ToricVariety, z: Sequence[int]) -> ExtremalRay:
    rel = _relation_of_class(x, z)
    k_neg = x.pair(z, canonical_class(x).vector) < 0
    return ExtremalRay(tuple(z), rel, k_neg, _kind(rel))


def extremal_rays(x: ToricVariety) -> list[ExtremalRay]:
    """All extremal rays of the Mori cone, sorted by curve class."""
    if x.is_point():
        return []
    rho = x.class_rank
    gens = sorted({primitive(z) for z in x.mori_generators})
    out = []
    for g in gens:
        if rho == 1:
            out.append(g)
            continue
        tight = [nr for nr in x.nef_rays if x.pair(nr, g) == 0]
        if tight and rank(tuple(tight), rho) == rho - 1:
            out.append(g)
    return [_make_ray(x, g) for g in sorted(out)]


def k_negative_rays(x: ToricVariety) -> list[ExtremalRay]:
    return [r for r in extremal_rays(x) if r.k_negative]


def _resolve_ray(x: ToricVariety, ray) -> ExtremalRay:
    if isinstance(ray, ExtremalRay):
        return ray
    z = primitive(tuple(int(c) for c in ray))
    for r in extremal_rays(x):
        if r.curve_class == z:
            return r
    raise InputError(f"{list(z)} is not an extremal ray class")


# --- contractions ---------------------------------------------------------------


def _fibering(x: ToricVariety, ray: ExtremalRay) -> ContractionSkeleton:
    fan = x.fan
    n = fan.rank
    n0 = saturation([fan.rays[i] for i in ray.positive_rays], n)
    k = len(n0)
    w, winv = adapted_basis(n0, n)
    proj = tuple(winv[k:])  # (n-k) x n
    comp = tuple(tuple(row[k:]) for row in w)  # n x (n-k)
    basis = tuple(tuple(w[i][j] for i in range(n)) for j in range(k))
    coords = tuple(winv[:k])
    m = n - k
    if m == 0:
        result = build_variety(Fan.from_data(0, [], [[]]))
        return ContractionSkeleton(FIBERING, ray, x, result, (), comp, basis, coords)
    image_rays: list = []
    image_cones = []
    for cone in fan.cones:
        imgs = [matvec(proj, fan.rays[i]) for i in cone]
        imgs = [primitive(v) for v in imgs if any(v)]
        c = RationalCone.spanned_by(m, imgs)
        idx = []
        for r in c.rays:
            if r not in image_rays:
                image_rays.append(r)
            idx.append(image_rays.index(r))
        image_cones.append(idx)
    try:
        new_fan = Fan.from_data(m, image_rays, image_cones)
    except InputError as exc:
        raise UnsupportedGeometryError(f"fibering contraction does not give a fan: {exc}") from None
    _check_q_factorial(new_fan)
    return ContractionSkeleton(FIBERING, ray, x, build_variety(new_fan), proj, comp, basis, coords)


def _check_q_factorial(fan: Fan) -> None:
    if not is_complete(fan):
        raise UnsupportedGeometryError("contraction result is not complete")
    if not is_simplicial(fan):
        bad = next(c for c in fan.maximal_cones if not c.is_simplicial())
        raise UnsupportedGeometryError(
            f"contraction result is not simplicial at cone {[list(r) for r in bad.rays]}"
        )


def _divisorial(x: ToricVariety, ray: ExtremalRay) -> ContractionSkeleton:
    fan = x.fan
    (gone,) = ray.negative_rays
    plus = set(ray.positive_rays)
    cones = []
    for cone in fan.cones:
        if gone in cone:
            cones.append(sorted((set(cone) - {gone}) | plus))
        else:
            cones.append(list(cone))
    rays = [r for i, r in enumerate(fan.rays) if i != gone]
    remap = {old: new for new, old in enumerate(i for i in range(len(fan.rays)) if i != gone)}
    cones = [[remap[i] for i in c] for c in cones]
    try:
        new_fan = Fan.from_data(fan.rank, rays, cones)
    except InputError as exc:
        raise UnsupportedGeometryError(f"divisorial contraction does not give a fan: {exc}") from None
    _check_q_factorial(new_fan)
    ident = tuple(tuple(int(i == j) for j in range(fan.rank)) for i in range(fan.rank))
    return ContractionSkeleton(DIVISORIAL, ray, x, build_variety(new_fan), ident)


def _flip_fan(fan: Fan, relation: Sequence[int]) -> Fan:
    plus = [i for i, c in enumerate(relation) if c > 0]
    minus = [i for i, c in enumerate(relation) if c < 0]
    circuit = set(plus) | set(minus)
    links = set()
    for cone in fan.cones:
        s = set(cone)
        if set(minus) <= s and len(s & set(plus)) == len(plus) - 1:
            links.add(frozenset(s - circuit))
    cone_set = {frozenset(c) for c in fan.cones}
    links = {
        link for link in links
        if all(frozenset((circuit - {j}) | link) in cone_set for j in plus)
    }
    if not links:
        raise InputError("relation is not a flippable circuit of this fan")
    removed = {frozenset((circuit - {j}) | link) for link in links for j in plus}
    added = {frozenset((circuit - {i}) | link) for link in links for i in minus}
    cones = [sorted(c) for c in (cone_set - removed) | added]
    return Fan.from_data(fan.rank, fan.rays, cones)


def toric_flip(x: ToricVariety, ray) -> tuple[ToricVariety, dict]:
    """Re-triangulate the circuit of a flipping ray; returns the flipped variety and exchange data."""
    ray = _resolve_ray(x, ray)
    if x.dim < 3:
        raise UnsupportedGeometryError("flip is impossible: surfaces and curves have no small contractions")
    if ray.kind != FLIPPING:
        raise InputError(f"ray {list(ray.curve_class)} is {ray.kind}, not flipping")
    try:
        new_fan = _flip_fan(x.fan, ray.relation)
    except InputError as exc:
        raise UnsupportedGeometryError(f"flip does not give a fan: {exc}") from None
    _check_q_factorial(new_fan)
    flipped = build_variety(new_fan)
    exchange = {
        "removed_positive": ray.positive_rays,
        "removed_negative": ray.negative_rays,
        "reverse_relation": tuple(-c for c in ray.relation),
    }
    return flipped, exchange


def contract(x: ToricVariety, ray) -> ContractionSkeleton:
    """Contract a K-negative extremal ray (fibering or divisorial) or flip it."""
    ray = _resolve_ray(x, ray)
    if not ray.k_negative:
        raise InputError(f"ray {list(ray.curve_class)} is not K-negative")
    if ray.kind == FIBERING:
        return _fibering(x, ray)
    if ray.kind == DIVISORIAL:
        return _divisorial(x, ray)
    flipped, _ = toric_flip(x, ray)
    n = x.dim
    ident = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
    return ContractionSkeleton(FLIPPING, ray, x, flipped, ident)


def contraction_morphism(skel: ContractionSkeleton) -> Optional[ToricMorphism]:
    if skel.kind == FLIPPING:
        return None
    lm = LatticeMap(skel.source.dim, skel.result.dim, skel.projection)
    return validate_morphism(lm, skel.source, skel.result)


# --- descent ----------------------------------------------------------------------


def ray_permutation(f: ToricMorphism, x: ToricVariety) -> dict[tuple, tuple]:
    """The permutation f_* induces on extremal ray classes (f_* is the transpose of f^*)."""
    action = pullback(f)
    at = transpose(action.matrix, action.size)
    rays = [r.curve_class for r in extremal_rays(x)]
    perm = {}
    for z in rays:
        image = matvec(at, z)
        target = None
        for w in rays:
            if _positive_multiple(image, w):
                target = w
                break
        if target is None:
            raise InputError("pushforward does not permute the extremal rays; map is not a surjective endomorphism")
        perm[z] = target
    if len(set(perm.values())) != len(perm):
        raise InputError("pushforward is not a permutation of the extremal rays")
    return perm


def _positive_multiple(v: Sequence, w: Sequence) -> bool:
    """Whether v = t w for some rational t > 0."""
    t = None
    for a, b in zip(v, w):
        if b == 0:
            if a != 0:
                return False
            continue
        r = Fraction(a) / b
        if r <= 0 or (t is not None and r != t):
            return False
        t = r
    return t is not None


def descend(f: ToricMorphism, skel: ContractionSkeleton) -> ContractionStep:
    """Push the smallest power of f fixing the contracted ray down to the result of the step."""
    x = skel.source
    if f.source.fan != x.fan or not f.is_endomorphism():
        raise InputError("descend needs an endomorphism of the step's source")
    perm = ray_permutation(f, x)
    z = skel.ray.curve_class
    n, w = 1, perm[z]
    while w != z:
        w = perm[w]
        n += 1
    fn = f.power(n)
    phi = fn.lattice_map.matrix
    y = skel.result
    if skel.kind == FIBERING:
        for v in skel.fiber_lattice:
            if any(matvec(skel.projection, matvec(phi, v))):
                raise InputError("iterate does not preserve the fiber sublattice")
        if y.dim == 0:
            g = LatticeMap(0, 0, ())
        else:
            g = LatticeMap(y.dim, y.dim, matmul(matmul(skel.projection, phi), skel.complement))
    else:
        g = fn.lattice_map
    descended = validate_morphism(g, y, y, require_surjective=True)
    return ContractionStep(skel.kind, skel.ray, x, y, n, fn, descended, contraction_morphism(skel), skel)


def class_projection(step: ContractionStep) -> Matrix:
    """Matrix comparing class lattices across a step: pi^* for contractions, identity for flips."""
    if step.contraction is None:
        rho = step.source.class_rank
        return tuple(tuple(Fraction(int(i == j)) for j in range(rho)) for i in range(rho))
    return class_pullback_matrix(step.contraction)


def equivariance_holds(step: ContractionStep) -> bool:
    """Exact identity pullback(f^n) . pi^* == pi^* . pullback(g)."""
    a = pullback(step.source_map).matrix
    p = class_projection(step)
    rho_y = step.result.class_rank
    if rho_y == 0:
        return True
    b = pullback(step.descended_map).matrix
    return matmul(a, p) == matmul(p, b)


# --- running the program -----------------------------------------------------------


def _degree(f: ToricMorphism) -> AlgebraicNumber:
    from toridyn.dynamics import dynamical_degree

    return dynamical_degree(pullback(f))


def _map_key(f: ToricMorphism) -> tuple:
    return f.source.fan.key(), f.lattice_map.matrix


def _finish(start: ToricMorphism, steps: tuple[ContractionStep, ...]) -> MMPTrace:
    endpoint_map = steps[-1].descended_map if steps else start
    endpoint = endpoint_map.source
    fib = [i for i, s in enumerate(steps) if s.kind == FIBERING]
    standard = not fib or (len(fib) == 1 and fib[0] == len(steps) - 1)
    stage_maps = [start] + [t.descended_map for t in steps[:-1]]
    degrees = [(s.source.dim, _degree(m)) for s, m in zip(steps, stage_maps)]
    if not endpoint.is_point():
        degrees.append((endpoint.dim, _degree(endpoint_map)))
    return MMPTrace(steps, start, endpoint, endpoint_map, endpoint.is_point(), standard, tuple(degrees))


def run_mmp(
    x: ToricVariety,
    f: ToricMorphism,
    strategy: str = "exhaustive",
    branch_cap: int = DEFAULT_BRANCH_CAP,
    choices: Sequence[int] = (),
) -> list[MMPTrace]:
    """Enumerate equivariant MMP traces starting from (x, f).

    ``exhaustive`` branches over every K-negative extremal ray, ``first_ray`` always
    takes the lexicographically smallest ray class, ``guided`` follows ``choices``
    (indices into the sorted K-negative rays at each stage, then first_ray).
    """
    if strategy not in ("exhaustive", "first_ray", "guided"):
        raise InputError(f"unknown strategy {strategy!r}")
    if f.source.fan != x.fan or not f.is_endomorphism():
        raise InputError("f must be an endomorphism of x")
    if not f.surjective:
        raise InputError("f must be surjective")
    memo: dict = {}
    count = [0]
    collected: list = []

    def suffixes(g: ToricMorphism, flips: int, depth: int) -> list[tuple[ContractionStep, ...]]:
        if flips > MAX_FLIPS:
            raise UnsupportedGeometryError(f"more than {MAX_FLIPS} flips in one trace")
        key = _map_key(g)
        if strategy == "exhaustive" and key in memo:
            return memo[key]
        y = g.source
        rays = k_negative_rays(y)
        if not rays:
            out = [()]
        else:
            if strategy == "exhaustive":
                picked = rays
            elif strategy == "guided" and depth < len(choices):
                i = choices[depth]
                if not 0 <= i < len(rays):
                    raise InputError(f"guided choice {i} out of range at stage {depth}")
                picked = [rays[i]]
            else:
                picked = rays[:1]
            out = []
            for ray in picked:
                step = descend(g, contract(y, ray))
                for tail in suffixes(step.descended_map, flips + (step.kind == FLIPPING), depth + 1):
                    out.append((step,) + tail)
                    if depth == 0:
                        count[0] += 1
                        collected.append((step,) + tail)
                        if count[0] > branch_cap:
                            raise BranchCapExceeded(
                                f"more than {branch_cap} MMP traces",
                                [_finish(f, s) for s in collected[:branch_cap]],
                            )
        if strategy == "exhaustive":
            memo[key] = out
        return out

    return [_finish(f, s) for s in suffixes(f, 0, 0)]


def primordial_degrees(
    x: ToricVariety, f: ToricMorphism, traces: Optional[Sequence[MMPTrace]] = None
) -> PrimordialDegrees:
    """Min and max of lambda_1 on the last positive-dimensional model over all tractable traces."""
    if traces is None:
        traces = run_mmp(x, f)
    best_lo = best_hi = None
    for t in traces:
        if not t.tractable:
            continue
        if not t.steps:
            lam = AlgebraicNumber.from_rational(1)
        else:
            lam = _degree(t.stage_maps()[-2])
        if best_lo is None or lam < best_lo[0]:
            best_lo = (lam, t)
        if best_hi is None or lam > best_hi[0]:
            best_hi = (lam, t)
    if best_lo is None:
        return PrimordialDegrees(None, None, (None, None))
    return PrimordialDegrees(best_lo[0], best_hi[0], (best_lo[1], best_hi[1]))
