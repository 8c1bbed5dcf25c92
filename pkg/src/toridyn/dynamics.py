"""Dynamical degree and int-amplified / polarized / amplified classification of pullback actions."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Optional

from toridyn.geometry.algebraic import AlgebraicNumber, dominant_root
from toridyn.geometry.feasibility import find_point
from toridyn.geometry.lattice import (
    det,
    identity,
    matpow,
    matsub,
    matvec,
    normalize_entries,
    nullspace,
    primitive_rational,
)
from toridyn.geometry.polynomial import (
    IntPolynomial,
    char_poly_coeffs,
    count_roots_in_closed_unit_disk,
    cyclotomic_factorization,
    rational_roots,
)
from toridyn.toric import PullbackAction, ToricMorphism, ToricVariety, pullback


@dataclass(frozen=True)
class Polarization:
    q: Fraction
    witness: tuple[int, ...]


@dataclass(frozen=True)
class DynamicalReport:
    lambda1: AlgebraicNumber
    lambda1_approx: str
    is_int_amplified: bool
    polarization: Optional[Polarization]
    amplified_witness: Optional[tuple[int, ...]]
    amplified_obstruction: Optional[tuple[Fraction, ...]]
    det_pullback: Fraction

    @property
    def is_polarized(self) -> bool:
        return self.polarization is not None

    @property
    def is_amplified(self) -> bool:
        return self.amplified_witness is not None


def dynamical_degree(action: PullbackAction) -> AlgebraicNumber:
    """Spectral radius of the action; the point (empty class lattice) has degree 1."""
    if action.size == 0:
        return AlgebraicNumber.from_rational(1)
    return dominant_root(action.char_polynomial)


def is_int_amplified(action: PullbackAction) -> bool:
    """All eigenvalues of modulus > 1.  The point is not int-amplified (no ample class moves)."""
    if action.size == 0:
        return False
    return count_roots_in_closed_unit_disk(action.char_polynomial) == 0


def matrix_order(m) -> Optional[int]:
    """Multiplicative order of a square rational matrix, or None if infinite (or singular).

    Finite order forces a product of cyclotomic factors; the lcm N of their indices
    is then a multiple of the order, and the order is the least divisor d of N with m^d = I.
    """
    n = len(m)
    if n == 0:
        return 1
    cs = char_poly_coeffs(m)
    if not all(Fraction(c).denominator == 1 for c in cs):
        return None
    fac = cyclotomic_factorization(IntPolynomial(tuple(int(c) for c in cs)))
    if fac is None or fac[0] > 0:
        return None
    big_n = 1
    for k in fac[1]:
        big_n = big_n * k // gcd(big_n, k)
    ident = identity(n)
    if normalize_entries(matpow(m, big_n)) != ident:
        return None
    return min(d for d in range(1, big_n + 1) if big_n % d == 0 and normalize_entries(matpow(m, d)) == ident)


def _nef_sum(x: ToricVariety) -> tuple[int, ...]:
    return tuple(sum(col) for col in zip(*x.nef_rays))


def is_polarized(action: PullbackAction, x: ToricVariety) -> Optional[Polarization]:
    """Largest rational q > 1 whose eigenspace meets the ample cone, with an integral ample witness."""
    if action.size == 0:
        return None
    m = action.matrix
    n = action.size
    guess = _nef_sum(x)
    for q in rational_roots(action.char_polynomial):
        if q <= 1:
            continue
        if matvec(m, guess) == tuple(q * g for g in guess):
            return Polarization(q, guess)
        shifted = matsub(m, tuple(tuple(q * v for v in row) for row in identity(n)))
        basis = nullspace(shifted, n)
        rows = [tuple(sum(z[i] * b[i] for i in range(n)) for b in basis) for z in x.mori_generators]
        t = find_point(len(basis), gt=[(r, 0) for r in rows])
        if t is None:
            continue
        vec = [sum(t[j] * basis[j][i] for j in range(len(basis))) for i in range(n)]
        return Polarization(q, primitive_rational(vec))
    return None


def _amplified_rows(action: PullbackAction, x: ToricVariety) -> list[tuple]:
    n = action.size
    a = matsub(action.matrix, identity(n))
    return [tuple(sum(z[i] * a[i][j] for i in range(n)) for j in range(n)) for z in x.mori_generators]


def is_amplified(action: PullbackAction, x: ToricVariety) -> Optional[tuple[int, ...]]:
    """An integral class L with f^*L - L ample, or None when no such class exists."""
    if action.size == 0:
        return None
    rows = _amplified_rows(action, x)
    guess = _nef_sum(x)
    if all(sum(r * g for r, g in zip(row, guess)) > 0 for row in rows):
        return guess
    sol = find_point(action.size, gt=[(row, 0) for row in rows])
    return None if sol is None else primitive_rational(sol)


def amplified_obstruction(action: PullbackAction, x: ToricVariety) -> Optional[tuple[Fraction, ...]]:
    """Farkas certificate of non-amplification.

    Weights y >= 0 on the Mori generators, summing to 1, with sum y_z z^T (f^* - I) = 0:
    then every f^*L - L pairs to zero with the effective curve sum y_z z, so none is ample.
    """
    if action.size == 0:
        return None
    rows = _amplified_rows(action, x)
    k = len(rows)
    eq = [(tuple(row[j] for row in rows), 0) for j in range(action.size)]
    eq.append((tuple(1 for _ in range(k)), 1))
    ge = [(tuple(int(i == j) for j in range(k)), 0) for i in range(k)]
    return find_point(k, ge=ge, eq=eq)


def analyze_action(action: PullbackAction, x: ToricVariety) -> DynamicalReport:
    lam = dynamical_degree(action)
    amp = is_amplified(action, x)
    return DynamicalReport(
        lambda1=lam,
        lambda1_approx=lam.approx(),
        is_int_amplified=is_int_amplified(action),
        polarization=is_polarized(action, x),
        amplified_witness=amp,
        amplified_obstruction=None if amp is not None else amplified_obstruction(action, x),
        det_pullback=Fraction(det(action.matrix)) if action.size else Fraction(1),
    )


def analyze(morphism: ToricMorphism) -> DynamicalReport:
    return analyze_action(pullback(morphism), morphism.source)
