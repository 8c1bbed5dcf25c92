"""Exact integer and rational linear algebra on small dense matrices.

Matrices are tuples of row tuples holding ``int`` or ``Fraction`` entries.
Nothing here touches floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence

from toridyn.errors import InputError

Matrix = tuple  # tuple[tuple[int | Fraction, ...], ...]


def as_matrix(rows: Sequence[Sequence], ncols: int | None = None) -> Matrix:
    m = tuple(tuple(r) for r in rows)
    widths = {len(r) for r in m}
    if len(widths) > 1:
        raise InputError(f"ragged matrix with row lengths {sorted(widths)}")
    if ncols is not None and m and len(m[0]) != ncols:
        raise InputError(f"expected {ncols} columns, got {len(m[0])}")
    return m


def shape(m: Matrix, ncols: int = 0) -> tuple[int, int]:
    return len(m), (len(m[0]) if m else ncols)


def identity(n: int) -> Matrix:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def zeros(r: int, c: int) -> Matrix:
    return tuple((0,) * c for _ in range(r))


def transpose(m: Matrix, ncols: int = 0) -> Matrix:
    r, c = shape(m, ncols)
    return tuple(tuple(m[i][j] for i in range(r)) for j in range(c))


def matmul(a: Matrix, b: Matrix, inner: int | None = None, bcols: int = 0) -> Matrix:
    """Product ``a @ b``; ``bcols`` fixes the width when ``b`` has no rows."""
    if not b:
        return tuple((0,) * bcols for _ in a)
    cols = list(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in cols) for row in a)


def matvec(a: Matrix, v: Sequence) -> tuple:
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def matpow(a: Matrix, k: int) -> Matrix:
    if k < 0:
        raise ValueError("negative matrix power")
    result = identity(len(a))
    base = a
    while k:
        if k & 1:
            result = matmul(result, base)
        base = matmul(base, base)
        k >>= 1
    return result


def matsub(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def scale(a: Matrix, s) -> Matrix:
    return tuple(tuple(s * x for x in row) for row in a)


def normalize_entries(m: Matrix) -> Matrix:
    """Turn integral Fractions back into ints so equal matrices compare and hash equal."""
    return tuple(
        tuple(int(x) if isinstance(x, Fraction) and x.denominator == 1 else x for x in row)
        for row in m
    )


def is_integral(m: Matrix) -> bool:
    return all(isinstance(x, int) or x.denominator == 1 for row in m for x in row)


def primitive(v: Sequence[int]) -> tuple[int, ...]:
    """Divide an integer vector by the gcd of its entries (zero stays zero)."""
    g = 0
    for x in v:
        g = gcd(g, int(x))
    if g == 0:
        return tuple(int(x) for x in v)
    return tuple(int(x) // g for x in v)


def primitive_rational(v: Sequence) -> tuple[int, ...]:
    """Smallest integer vector on the positive half-line through a rational vector."""
    den = 1
    for x in v:
        den = den * Fraction(x).denominator // gcd(den, Fraction(x).denominator)
    return primitive([int(Fraction(x) * den) for x in v])


# --- rational Gaussian elimination ---------------------------------------


def _rref(m: Matrix, ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    rows = [[Fraction(x) for x in row] for row in m]
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def rank(m: Matrix, ncols: int | None = None) -> int:
    if not m:
        return 0
    return len(_rref(m, len(m[0]) if ncols is None else ncols)[1])


def nullspace(m: Matrix, ncols: int) -> list[tuple[Fraction, ...]]:
    """Rational basis of ``{x : m x = 0}``."""
    if not m:
        return [tuple(Fraction(int(i == j)) for j in range(ncols)) for i in range(ncols)]
    rows, pivots = _rref(m, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -rows[i][f]
        basis.append(tuple(v))
    return basis


def solve(m: Matrix, b: Sequence, ncols: int) -> tuple[Fraction, ...] | None:
    """One rational solution of ``m x = b`` or ``None`` when inconsistent."""
    aug = tuple(tuple(row) + (bi,) for row, bi in zip(m, b))
    rows, pivots = _rref(aug, ncols + 1)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for i, p in enumerate(pivots):
        x[p] = rows[i][ncols]
    return tuple(x)


def inverse(m: Matrix) -> Matrix:
    n = len(m)
    aug = tuple(tuple(row) + identity(n)[i] for i, row in enumerate(m))
    rows, pivots = _rref(aug, 2 * n)
    if pivots[:n] != list(range(n)):
        raise InputError("matrix is singular")
    return normalize_entries(tuple(tuple(row[n:]) for row in rows))


def det(m: Matrix):
    """Bareiss fraction-free determinant; exact for int and Fraction entries."""
    n = len(m)
    if n == 0:
        return 1
    a = [list(row) for row in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            p = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if p is None:
                return 0
            a[k], a[p] = a[p], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = a[i][j] * a[k][k] - a[i][k] * a[k][j]
                a[i][j] = num / prev if isinstance(num, Fraction) or isinstance(prev, Fraction) else num // prev
        prev = a[k][k]
    d = sign * a[n - 1][n - 1]
    return int(d) if isinstance(d, Fraction) and d.denominator == 1 else d


# --- integer normal forms -------------------------------------------------


def smith_normal_form(m: Matrix, ncols: int | None = None) -> tuple[Matrix, Matrix, Matrix]:
    """Return ``(U, D, V)`` with ``U @ m @ V == D`` diagonal and ``d1 | d2 | ...``.

    ``U`` and ``V`` are unimodular; invariant factors are non-negative.
    """
    rows = len(m)
    cols = (len(m[0]) if m else 0) if ncols is None else ncols
    a = [[int(x) for x in row] for row in m]
    u = [list(r) for r in identity(rows)]
    v = [list(r) for r in identity(cols)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, f):  # row_dst += f * row_src
        a[dst] = [x + f * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x + f * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, f):  # col_dst += f * col_src
        for row in a:
            row[dst] += f * row[src]
        for row in v:
            row[dst] += f * row[src]

    for t in range(min(rows, cols)):
        while True:
            nz = [(abs(a[i][j]), i, j) for i in range(t, rows) for j in range(t, cols) if a[i][j]]
            if not nz:
                break
            _, pi, pj = min(nz)
            swap_rows(t, pi)
            swap_cols(t, pj)
            dirty = False
            for i in range(t + 1, rows):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // a[t][t]))
                    dirty = dirty or a[i][t] != 0
            for j in range(t + 1, cols):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // a[t][t]))
                    dirty = dirty or a[t][j] != 0
            if dirty:
                continue
            # pivot must divide the whole remaining block
            bad = next(
                ((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols) if a[i][j] % a[t][t]),
                None,
            )
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
    return as_matrix(u), as_matrix(a), as_matrix(v)


def invariant_factors(m: Matrix, ncols: int | None = None) -> tuple[int, ...]:
    _, d, _ = smith_normal_form(m, ncols)
    return tuple(d[i][i] for i in range(min(len(d), len(d[0]) if d else 0)))


def hermite_normal_form(m: Matrix) -> Matrix:
    """Row-style HNF of an integer matrix: echelon, positive pivots, reduced above.

    Zero rows are dropped, so the result is a basis of the row lattice.
    """
    a = [[int(x) for x in row] for row in m]
    if not a:
        return ()
    cols = len(a[0])
    r = 0
    pivots = []
    for c in range(cols):
        # gcd-combine rows r.. into a single pivot at (r, c)
        while True:
            nz = [i for i in range(r, len(a)) if a[i][c]]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(a[i][c]))
            a[r], a[p] = a[p], a[r]
            done = True
            for i in range(r + 1, len(a)):
                if a[i][c]:
                    q = a[i][c] // a[r][c]
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                    done = done and a[i][c] == 0
            if done:
                break
        if r < len(a) and a[r][c]:
            if a[r][c] < 0:
                a[r] = [-x for x in a[r]]
            for i in range(r):
                q = a[i][c] // a[r][c]
                a[i] = [x - q * y for x, y in zip(a[i], a[r])]
            pivots.append(c)
            r += 1
            if r == len(a):
                break
    return as_matrix(a[:r])


def integer_kernel(m: Matrix, ncols: int) -> list[tuple[int, ...]]:
    """Z-basis of ``{x in Z^ncols : m x = 0}``."""
    if not m:
        return [identity(ncols)[i] for i in range(ncols)]
    _, d, v = smith_normal_form(m, ncols)
    r = sum(1 for i in range(min(len(d), ncols)) if d[i][i])
    return [tuple(v[i][j] for i in range(ncols)) for j in range(r, ncols)]


def saturation(vectors: Sequence[Sequence[int]], dim: int) -> list[tuple[int, ...]]:
    """Z-basis of ``span_Q(vectors) ∩ Z^dim``."""
    vectors = [tuple(v) for v in vectors if any(v)]
    if not vectors:
        return []
    left = integer_kernel(tuple(vectors), dim)  # functionals vanishing on the span
    if not left:
        return [identity(dim)[i] for i in range(dim)]
    return integer_kernel(tuple(left), dim)


def adapted_basis(sublattice: Sequence[Sequence[int]], dim: int) -> tuple[Matrix, Matrix]:
    """Unimodular ``W`` whose first ``k`` columns span a saturated sublattice; returns ``(W, W^-1)``."""
    k = len(sublattice)
    if k == 0:
        return identity(dim), identity(dim)
    b0 = transpose(tuple(tuple(v) for v in sublattice))
    u, d, _ = smith_normal_form(b0, k)
    if any(d[i][i] != 1 for i in range(k)):
        raise InputError("sublattice is not saturated")
    return inverse(u), u


# --- lattice value types ---------------------------------------------------


@dataclass(frozen=True)
class Lattice:
    rank: int

    def __post_init__(self):
        if self.rank < 0:
            raise InputError("lattice rank must be non-negative")


@dataclass(frozen=True)
class LatticeMap:
    """Integer matrix of a lattice homomorphism Z^source_rank -> Z^target_rank."""

    source_rank: int
    target_rank: int
    matrix: Matrix

    def __post_init__(self):
        m = as_matrix(self.matrix)
        if len(m) != self.target_rank or any(len(r) != self.source_rank for r in m):
            raise InputError(
                f"lattice map matrix must be {self.target_rank}x{self.source_rank}"
            )
        if not all(isinstance(x, int) for r in m for x in r):
            if not is_integral(m):
                raise InputError("lattice map entries must be integers")
            m = tuple(tuple(int(x) for x in r) for r in m)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_rows(cls, rows) -> "LatticeMap":
        m = as_matrix(rows)
        n_out = len(m)
        n_in = len(m[0]) if m else 0
        return cls(n_in, n_out, m)

    @classmethod
    def identity(cls, n: int) -> "LatticeMap":
        return cls(n, n, identity(n))

    @classmethod
    def dilation(cls, n: int, k: int) -> "LatticeMap":
        return cls(n, n, scale(identity(n), k))

    def __call__(self, v: Sequence[int]) -> tuple[int, ...]:
        return matvec(self.matrix, v)

    def compose(self, other: "LatticeMap") -> "LatticeMap":
        """``self ∘ other``."""
        if other.target_rank != self.source_rank:
            raise InputError("rank mismatch in composition")
        return LatticeMap(other.source_rank, self.target_rank,
                          matmul(self.matrix, other.matrix, bcols=other.source_rank))

    def power(self, k: int) -> "LatticeMap":
        if self.source_rank != self.target_rank:
            raise InputError("only endomorphisms have powers")
        return LatticeMap(self.source_rank, self.source_rank, matpow(self.matrix, k))

    def rank(self) -> int:
        return rank(self.matrix, self.source_rank)

    def is_rationally_surjective(self) -> bool:
        return self.rank() == self.target_rank
