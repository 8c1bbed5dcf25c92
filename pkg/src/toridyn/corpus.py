"""Standard toric fans used as worked examples and test corpus."""

from __future__ import annotations

from itertools import product as _product

from toridyn.geometry.cones import Fan


def point() -> Fan:
    return Fan.from_data(0, [], [[]])


def projective_space(n: int) -> Fan:
    """P^n: rays e_1..e_n and -(e_1+...+e_n)."""
    rays = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    rays.append(tuple(-1 for _ in range(n)))
    cones = [[j for j in range(n + 1) if j != i] for i in range(n + 1)]
    return Fan.from_data(n, rays, cones)


def hirzebruch(a: int) -> Fan:
    """F_a: rays (1,0), (0,1), (-1,a), (0,-1)."""
    rays = [(1, 0), (0, 1), (-1, a), (0, -1)]
    cones = [[0, 1], [1, 2], [2, 3], [3, 0]]
    return Fan.from_data(2, rays, cones)


def product(*fans: Fan) -> Fan:
    """Product fan in the direct-sum lattice."""
    rank = sum(f.rank for f in fans)
    rays, cones = [], []
    offsets = []
    for f in fans:
        offsets.append(len(rays))
        start = sum(g.rank for g in fans[: len(offsets) - 1])
        for r in f.rays:
            v = [0] * rank
            v[start:start + f.rank] = r
            rays.append(tuple(v))
    for combo in _product(*[f.cones for f in fans]):
        cones.append([offsets[k] + i for k, c in enumerate(combo) for i in c])
    return Fan.from_data(rank, rays, cones)


def blowup_p2() -> Fan:
    """F_1 presented as the blow-up of P^2 at a torus-fixed point (exceptional ray (1,1))."""
    return Fan.from_data(2, [(1, 0), (0, 1), (1, 1), (-1, -1)], [[0, 2], [2, 1], [1, 3], [3, 0]])


def flip_threefold() -> Fan:
    """Projective simplicial threefold with a K-negative flipping ray.

    The circuit 2*(1,0,0) + 2*(0,1,0) = (1,1,1) + (1,1,-1) is the flipping relation;
    the fan is the face fan of a polytope, hence projective.
    """
    rays = [(1, 0, 0), (0, 1, 0), (1, 1, 1), (1, 1, -1), (0, -1, 0), (-1, -1, 0)]
    cones = [[0, 2, 3], [0, 2, 4], [0, 3, 4], [1, 2, 3], [1, 2, 5], [1, 3, 5], [2, 4, 5], [3, 4, 5]]
    return Fan.from_data(3, rays, cones)


def endomorphisms() -> list[tuple[str, Fan, tuple[tuple[int, ...], ...]]]:
    """Named surjective toric endomorphisms (fan, lattice map rows) used across tests and sample jobs."""
    p1, p2 = projective_space(1), projective_space(2)
    p1p1, f1 = product(p1, p1), blowup_p2()
    return [
        ("p1_dilation_2", p1, ((2,),)),
        ("p1_dilation_3", p1, ((3,),)),
        ("p1_inversion", p1, ((-1,),)),
        ("p2_dilation_2", p2, ((2, 0), (0, 2))),
        ("p2_dilation_3", p2, ((3, 0), (0, 3))),
        ("p2_rotation", p2, ((0, -1), (1, -1))),
        ("p1p1_diag_2_3", p1p1, ((2, 0), (0, 3))),
        ("p1p1_id_times_2", p1p1, ((1, 0), (0, 2))),
        ("p1p1_swap", p1p1, ((0, 1), (1, 0))),
        ("p1p1_swap_times_2", p1p1, ((0, 2), (2, 0))),
        ("p1p1_diag_neg2_3", p1p1, ((-2, 0), (0, 3))),
        ("f1_identity", f1, ((1, 0), (0, 1))),
        ("f1_dilation_2", f1, ((2, 0), (0, 2))),
        ("f1_dilation_3", f1, ((3, 0), (0, 3))),
        ("flip3_dilation_2", flip_threefold(), ((2, 0, 0), (0, 2, 0), (0, 0, 2))),
    ]
