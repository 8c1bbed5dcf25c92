"""Rational polyhedral cones and fans with canonical ray ordering."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Sequence

from toridyn.errors import InputError
from toridyn.geometry.feasibility import find_point, in_cone
from toridyn.geometry.lattice import Lattice, integer_kernel, inverse, nullspace, primitive, primitive_rational, rank

Vector = tuple  # tuple[int, ...]


def _is_primitive(v: Sequence[int]) -> bool:
    return any(v) and primitive(v) == tuple(v)


@dataclass(frozen=True)
class RationalCone:
    """Cone spanned by primitive integer rays; rays are kept lexicographically sorted."""

    ambient_rank: int
    rays: tuple[Vector, ...]

    def __post_init__(self):
        rays = tuple(sorted({tuple(int(x) for x in r) for r in self.rays}))
        if len(rays) != len(self.rays):
            raise InputError(f"duplicate rays in cone {list(self.rays)}")
        for r in rays:
            if len(r) != self.ambient_rank:
                raise InputError(f"ray {r} does not live in rank {self.ambient_rank}")
            if not _is_primitive(r):
                raise InputError(f"ray {r} is not primitive")
        for i, r in enumerate(rays):
            if in_cone(r, rays[:i] + rays[i + 1:]):
                raise InputError(f"ray {r} is redundant in cone {list(rays)}")
        object.__setattr__(self, "rays", rays)

    @classmethod
    def spanned_by(cls, ambient_rank: int, vectors: Iterable[Sequence]) -> "RationalCone":
        """Cone generated by arbitrary nonzero rational vectors, reduced to its primitive extremal rays."""
        prims = sorted({primitive_rational(v) for v in vectors if any(v)})
        keep = [r for i, r in enumerate(prims) if not in_cone(r, prims[:i] + prims[i + 1:])]
        return cls(ambient_rank, tuple(keep))

    @property
    def dim(self) -> int:
        return rank(self.rays, self.ambient_rank) if self.rays else 0

    def is_simplicial(self) -> bool:
        return self.dim == len(self.rays)

    def is_pointed(self) -> bool:
        if not self.rays:
            return True
        # pointed iff some functional is strictly positive on every ray
        return find_point(self.ambient_rank, gt=[(r, 0) for r in self.rays]) is not None

    def contains(self, v: Sequence) -> bool:
        return in_cone(tuple(v), self.rays)

    def facets(self) -> list[tuple[Vector, ...]]:
        """Ray subsets spanning the facets of a full-dimensional cone."""
        n = self.ambient_rank
        out = set()
        for sub in combinations(self.rays, n - 1):
            if rank(sub, n) != n - 1:
                continue
            normal = nullspace(sub, n) if sub else nullspace((), n)
            u = normal[0]
            vals = [sum(a * b for a, b in zip(u, r)) for r in self.rays]
            if all(x >= 0 for x in vals) or all(x <= 0 for x in vals):
                out.add(tuple(r for r, x in zip(self.rays, vals) if x == 0))
        return sorted(out)


def _separated(c1: RationalCone, c2: RationalCone) -> bool:
    """Whether c1 and c2 meet along the common face spanned by their shared rays."""
    common = set(c1.rays) & set(c2.rays)
    n = c1.ambient_rank
    eq = [(r, 0) for r in sorted(common)]
    gt = [(r, 0) for r in c1.rays if r not in common]
    gt += [(tuple(-x for x in r), 0) for r in c2.rays if r not in common]
    return find_point(n, gt=gt, eq=eq) is not None


def _check_same_rank(cones: Sequence[RationalCone]) -> int:
    ranks = {c.ambient_rank for c in cones}
    if len(ranks) > 1:
        raise InputError(f"cones live in lattices of different ranks {sorted(ranks)}")
    return ranks.pop() if ranks else 0


def overlapping_pair(cones: Sequence[RationalCone]) -> tuple[int, int] | None:
    _check_same_rank(cones)
    for i, j in combinations(range(len(cones)), 2):
        if not _separated(cones[i], cones[j]):
            return i, j
    return None


def is_fan(cones: Sequence[RationalCone]) -> bool:
    """Every cone is pointed and every pair meets in a common face."""
    _check_same_rank(cones)
    return all(c.is_pointed() for c in cones) and overlapping_pair(cones) is None


@dataclass(frozen=True)
class Wall:
    """A codimension-one cone shared by two maximal cones, with its primitive ray relation.

    ``relation`` is indexed by the fan's ray list; ``opposite`` are the indices of
    the two rays off the wall (both with positive coefficient).
    """

    cone: RationalCone
    wall_rays: tuple[int, ...]
    opposite: tuple[int, int]
    relation: tuple[int, ...]


@dataclass(frozen=True)
class Fan:
    """A fan in Z^rank stored as sorted primitive rays plus maximal cones as index tuples."""

    lattice: Lattice
    rays: tuple[Vector, ...]
    cones: tuple[tuple[int, ...], ...]
    maximal_cones: tuple[RationalCone, ...] = field(compare=False, repr=False, default=())

    @classmethod
    def from_data(cls, rank_: int, rays: Sequence[Sequence[int]], cones: Sequence[Sequence[int]],
                  check: bool = True) -> "Fan":
        """Canonicalize and validate a fan given by rays and cone index lists."""
        lattice = Lattice(rank_)
        if rank_ == 0:
            if rays:
                raise InputError("rank-0 fan cannot have rays")
            return cls(lattice, (), ((),), (RationalCone(0, ()),))
        vecs = []
        for r in rays:
            r = tuple(int(x) for x in r)
            if len(r) != rank_:
                raise InputError(f"ray {list(r)} has wrong length for rank {rank_}")
            if not any(r):
                raise InputError("zero vector given as a ray")
            vecs.append(primitive(r))
        cone_sets = []
        for c in cones:
            idx = [int(i) for i in c]
            for i in idx:
                if not 0 <= i < len(vecs):
                    raise InputError(f"cone {idx} refers to missing ray {i}")
            cone_sets.append(frozenset(vecs[i] for i in idx))
        if not cone_sets:
            raise InputError("fan has no cones")
        used = sorted(set().union(*cone_sets))
        if len(used) != len(set(vecs)):
            raise InputError("every ray must belong to some cone")
        # keep maximal cones only (faces listed separately are dropped)
        maximal = [c for c in set(cone_sets) if not any(c < d for d in cone_sets)]
        position = {r: i for i, r in enumerate(used)}
        cone_idx = sorted(tuple(sorted(position[r] for r in c)) for c in maximal)
        rc = tuple(RationalCone(rank_, tuple(used[i] for i in c)) for c in cone_idx)
        if check:
            for c in rc:
                if not c.is_pointed():
                    raise InputError(f"cone {list(c.rays)} is not strongly convex")
            bad = overlapping_pair(rc)
            if bad is not None:
                a, b = bad
                raise InputError(
                    f"cones {list(rc[a].rays)} and {list(rc[b].rays)} do not meet in a common face"
                )
        return cls(lattice, tuple(used), tuple(cone_idx), rc)

    def __post_init__(self):
        if not self.maximal_cones:
            rc = tuple(RationalCone(self.lattice.rank, tuple(self.rays[i] for i in c)) for c in self.cones)
            object.__setattr__(self, "maximal_cones", rc)

    @property
    def rank(self) -> int:
        return self.lattice.rank

    def key(self) -> tuple:
        return self.rank, self.rays, self.cones

    def ray_index(self, v: Sequence[int]) -> int:
        return self.rays.index(tuple(v))

    def is_point(self) -> bool:
        return self.rank == 0


def is_complete(fan: Fan) -> bool:
    """Support is the whole space: pure full-dimensional and every facet shared by exactly two cones."""
    n = fan.rank
    if n == 0:
        return True
    if any(c.dim != n for c in fan.maximal_cones):
        return False
    counts: dict = {}
    for c in fan.maximal_cones:
        for f in c.facets():
            counts[f] = counts.get(f, 0) + 1
    return bool(counts) and all(v == 2 for v in counts.values())


def is_simplicial(fan: Fan) -> bool:
    return all(c.is_simplicial() for c in fan.maximal_cones)


def simplicial_coordinates(fan: Fan, v: Sequence) -> tuple[int, tuple] | None:
    """First maximal cone (canonical order) containing ``v`` and its coefficients on the cone's rays.

    Requires a simplicial fan; coefficients are Fractions indexed like ``fan.cones[i]``.
    """
    v = tuple(v)
    for ci, inv in enumerate(_cone_inverses(fan)):
        coeffs = tuple(sum(a * b for a, b in zip(row, v)) for row in inv)
        if all(c >= 0 for c in coeffs) and _reconstructs(fan, ci, coeffs, v):
            return ci, coeffs
    return None


def _reconstructs(fan: Fan, ci: int, coeffs, v) -> bool:
    rays = [fan.rays[i] for i in fan.cones[ci]]
    return all(sum(c * r[k] for c, r in zip(coeffs, rays)) == v[k] for k in range(fan.rank))


@lru_cache(maxsize=512)
def _cone_inverses_cached(key) -> tuple:
    rank_, rays, cones = key
    out = []
    for c in cones:
        m = tuple(rays[i] for i in c)  # rows are rays; want left solution of sum c_i r_i = v
        pinv = _left_solver(m, rank_)
        out.append(pinv)
    return tuple(out)


def _cone_inverses(fan: Fan) -> tuple:
    return _cone_inverses_cached(fan.key())


def _left_solver(rows, n):
    """Matrix S with S v = coefficients of v on linearly independent ``rows`` when v is in their span."""
    k = len(rows)
    if k == 0:
        return ()
    # S = (R R^T)^-1 R with R the k x n matrix of rays
    gram = tuple(tuple(sum(a * b for a, b in zip(ri, rj)) for rj in rows) for ri in rows)
    gi = inverse(gram)
    return tuple(tuple(sum(gi[i][t] * rows[t][j] for t in range(k)) for j in range(n)) for i in range(k))


def walls(fan: Fan) -> list[Wall]:
    """All interior walls of a complete simplicial fan with their normalized relations."""
    if not is_complete(fan) or not is_simplicial(fan):
        raise InputError("walls need a complete simplicial fan")
    n = fan.rank
    if n == 0:
        return []
    by_facet: dict = {}
    for c in fan.cones:
        for drop in c:
            facet = tuple(i for i in c if i != drop)
            by_facet.setdefault(facet, []).append(drop)
    out = []
    for facet, opp in sorted(by_facet.items()):
        if len(opp) != 2:
            raise InputError(f"facet {facet} is not shared by exactly two cones")
        a, b = sorted(opp)
        idx = (a, b) + facet
        cols = [fan.rays[i] for i in idx]
        mat = tuple(tuple(col[r] for col in cols) for r in range(n))
        ker = integer_kernel(mat, len(idx))
        if len(ker) != 1:
            raise InputError(f"wall {facet} has no unique relation")
        k = primitive(ker[0])
        if k[0] < 0:
            k = tuple(-x for x in k)
        rel = [0] * len(fan.rays)
        for i, c in zip(idx, k):
            rel[i] = c
        cone = RationalCone(n, tuple(fan.rays[i] for i in facet))
        out.append(Wall(cone, facet, (a, b), tuple(rel)))
    return out
