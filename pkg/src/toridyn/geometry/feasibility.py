"""Exact feasibility of small systems of linear equalities and (strict) inequalities.

Equalities are removed by rational parametrization, then Fourier-Motzkin
elimination decides the remaining inequality system and back-substitution
produces an explicit rational point.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

from toridyn.geometry.lattice import nullspace, solve

# an inequality row is (coeffs, rhs, strict) meaning coeffs.x >= rhs (or > rhs)
Row = tuple


def _normalize(coeffs: Sequence[Fraction], rhs: Fraction, strict: bool) -> Row:
    den = 1
    for c in list(coeffs) + [rhs]:
        den = den * c.denominator // gcd(den, c.denominator)
    ints = [int(c * den) for c in coeffs]
    r = int(rhs * den)
    g = 0
    for c in ints + [r]:
        g = gcd(g, c)
    if g > 1:
        ints = [c // g for c in ints]
        r //= g
    return tuple(Fraction(c) for c in ints), Fraction(r), strict


def _trivially_ok(row: Row) -> bool | None:
    """For a row with no variables: True if satisfied, False if violated, None otherwise."""
    coeffs, rhs, strict = row
    if any(coeffs):
        return None
    return (0 > rhs) if strict else (0 >= rhs)


def _dedupe(rows: list[Row]) -> list[Row]:
    best: dict = {}
    for coeffs, rhs, strict in rows:
        key = coeffs
        if key not in best:
            best[key] = (rhs, strict)
        else:
            r0, s0 = best[key]
            if rhs > r0 or (rhs == r0 and strict and not s0):
                best[key] = (rhs, strict)
    return [(k, r, s) for k, (r, s) in best.items()]


def _fm_solve(rows: list[Row], n: int) -> tuple[Fraction, ...] | None:
    if n == 0:
        return () if all(_trivially_ok(r) is not False for r in rows) else None
    stages = []
    current = [_normalize(*r) for r in rows]
    for k in range(n - 1, -1, -1):
        keep, lower, upper = [], [], []
        for row in current:
            ok = _trivially_ok(row)
            if ok is False:
                return None
            if ok:
                continue
            c = row[0][k]
            (lower if c > 0 else upper if c < 0 else keep).append(row)
        stages.append((k, lower, upper))
        new = list(keep)
        for lc, lr, ls in lower:
            for uc, ur, us in upper:
                a, b = lc[k], -uc[k]
                coeffs = tuple(b * x + a * y for x, y in zip(lc, uc))
                new.append(_normalize(coeffs, b * lr + a * ur, ls or us))
        current = _dedupe(new)
    for row in current:
        if _trivially_ok(row) is False:
            return None
    x = [Fraction(0)] * n
    for k, lower, upper in reversed(stages):
        lo = lo_strict = hi = hi_strict = None
        for coeffs, rhs, strict in lower:
            rest = sum(coeffs[j] * x[j] for j in range(n) if j != k)
            bound = (rhs - rest) / coeffs[k]
            if lo is None or bound > lo or (bound == lo and strict):
                lo, lo_strict = bound, strict
        for coeffs, rhs, strict in upper:
            rest = sum(coeffs[j] * x[j] for j in range(n) if j != k)
            bound = (rhs - rest) / coeffs[k]
            if hi is None or bound < hi or (bound == hi and strict):
                hi, hi_strict = bound, strict
        if lo is None and hi is None:
            x[k] = Fraction(0)
        elif hi is None:
            x[k] = lo + 1 if lo_strict else lo
        elif lo is None:
            x[k] = hi - 1 if hi_strict else hi
        elif not lo_strict:
            x[k] = lo
        elif not hi_strict:
            x[k] = hi
        else:
            x[k] = (lo + hi) / 2
    return tuple(x)


def find_point(
    n: int,
    ge: Sequence[tuple[Sequence, object]] = (),
    gt: Sequence[tuple[Sequence, object]] = (),
    eq: Sequence[tuple[Sequence, object]] = (),
) -> tuple[Fraction, ...] | None:
    """A rational x in Q^n with a.x >= b for ``ge``, a.x > b for ``gt`` and a.x = b for ``eq``.

    Returns ``None`` when the system is infeasible.
    """
    if eq:
        a = tuple(tuple(Fraction(c) for c in row) for row, _ in eq)
        b = [Fraction(r) for _, r in eq]
        x0 = solve(a, b, n)
        if x0 is None:
            return None
        basis = nullspace(a, n)
    else:
        x0 = tuple(Fraction(0) for _ in range(n))
        basis = [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]
    k = len(basis)

    def reparam(row, rhs, strict):
        row = [Fraction(c) for c in row]
        coeffs = tuple(sum(r * v for r, v in zip(row, vec)) for vec in basis)
        return coeffs, Fraction(rhs) - sum(r * v for r, v in zip(row, x0)), strict

    rows = [reparam(r, b, False) for r, b in ge] + [reparam(r, b, True) for r, b in gt]
    t = _fm_solve(rows, k)
    if t is None:
        return None
    return tuple(x0[i] + sum(t[j] * basis[j][i] for j in range(k)) for i in range(n))


def in_cone(v: Sequence, generators: Sequence[Sequence]) -> bool:
    """Whether ``v`` is a non-negative combination of ``generators``."""
    if not any(v):
        return True
    gens = [tuple(g) for g in generators]
    if not gens:
        return False
    m = len(gens)
    n = len(v)
    eq = [(tuple(g[i] for g in gens), v[i]) for i in range(n)]
    ge = [(tuple(int(j == i) for j in range(m)), 0) for i in range(m)]
    return find_point(m, ge=ge, eq=eq) is not None
