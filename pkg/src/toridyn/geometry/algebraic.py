"""Exact real algebraic numbers represented by a minimal polynomial and an isolating interval."""

from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal, localcontext
from fractions import Fraction
from functools import total_ordering

from toridyn.errors import InputError
from toridyn.geometry import polynomial as P
from toridyn.geometry.lattice import matpow
from toridyn.geometry.polynomial import IntPolynomial

DEFAULT_WIDTH = Fraction(1, 10**9)


def _roots_in_closed(p: list, lo: Fraction, hi: Fraction) -> int:
    """Distinct real roots of squarefree ``p`` in [lo, hi]."""
    n = P.count_real_roots(p, lo, hi)
    if P._eval(p, lo) == 0:
        n += 1
    return n


def _squarefree(p: list) -> list:
    p = [Fraction(c) for c in p]
    return P._exact_div(p, P._gcd(p, P._deriv(p)))


def companion(p: IntPolynomial):
    """Companion matrix of a monic polynomial (rational entries otherwise)."""
    cs = [Fraction(c, p.leading) for c in p.coefficients]
    n = p.degree
    rows = []
    for i in range(n):
        row = [Fraction(0)] * n
        if i + 1 < n:
            row[i + 1] = Fraction(1)
        rows.append(row)
    rows[-1] = [-cs[n - j] for j in range(n)]
    return tuple(tuple(r) for r in rows)


@total_ordering
@dataclass(frozen=True, eq=False)
class AlgebraicNumber:
    """A real root of an irreducible primitive integer polynomial.

    ``lo <= hi`` bound exactly one root; ``lo == hi`` means the number is that rational.
    """

    minimal_polynomial: IntPolynomial
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        if self.lo > self.hi:
            raise InputError("empty isolating interval")
        cs = list(self.minimal_polynomial.coefficients)
        if _roots_in_closed(cs, self.lo, self.hi) != 1:
            raise InputError("interval does not isolate exactly one root")

    @classmethod
    def from_rational(cls, q) -> "AlgebraicNumber":
        q = Fraction(q)
        return cls(IntPolynomial((q.denominator, -q.numerator)), q, q)

    @classmethod
    def from_real_root(cls, poly, lo, hi) -> "AlgebraicNumber":
        """Wrap the unique root of ``poly`` in [lo, hi], choosing the right irreducible factor."""
        if not isinstance(poly, IntPolynomial):
            poly = IntPolynomial.from_rational(poly)
        lo, hi = Fraction(lo), Fraction(hi)
        for f, _ in P.factor(poly):
            if _roots_in_closed(list(f.coefficients), lo, hi) >= 1:
                if f.degree == 1:
                    return cls.from_rational(Fraction(-f.coefficients[1], f.coefficients[0]))
                return cls(f, lo, hi)
        raise InputError("no root of the polynomial in the interval")

    @property
    def isolating_interval(self) -> tuple[Fraction, Fraction]:
        return self.lo, self.hi

    @property
    def degree(self) -> int:
        return self.minimal_polynomial.degree

    def is_rational(self) -> bool:
        return self.degree == 1

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("not a rational number")
        a, b = self.minimal_polynomial.coefficients
        return Fraction(-b, a)

    def refined(self, width: Fraction = DEFAULT_WIDTH) -> "AlgebraicNumber":
        if self.is_rational():
            q = self.as_fraction()
            return AlgebraicNumber(self.minimal_polynomial, q, q)
        lo, hi = P.refine_root(list(self.minimal_polynomial.coefficients), self.lo, self.hi, Fraction(width))
        return AlgebraicNumber(self.minimal_polynomial, lo, hi)

    def approx(self, digits: int = 10) -> str:
        """Decimal string with exactly ``digits`` places (formatting only)."""
        a = self.refined(Fraction(1, 10 ** (digits + 3)))
        mid = (a.lo + a.hi) / 2
        with localcontext() as ctx:
            ctx.prec = 200
            d = Decimal(mid.numerator) / Decimal(mid.denominator)
            return str(d.quantize(Decimal(1).scaleb(-digits), rounding=ROUND_HALF_EVEN))

    def __float__(self) -> float:
        a = self.refined(Fraction(1, 10**18))
        return float((a.lo + a.hi) / 2)

    def _cmp(self, other: "AlgebraicNumber") -> int:
        if not isinstance(other, AlgebraicNumber):
            other = AlgebraicNumber.from_rational(other)
        a, b = self, other
        if a.is_rational() and b.is_rational():
            x, y = a.as_fraction(), b.as_fraction()
            return (x > y) - (x < y)
        if a.minimal_polynomial == b.minimal_polynomial:
            lo, hi = max(a.lo, b.lo), min(a.hi, b.hi)
            if lo <= hi and _roots_in_closed(list(a.minimal_polynomial.coefficients), lo, hi) >= 1:
                return 0
        # distinct numbers: refine until the intervals separate
        width = max(a.hi - a.lo, b.hi - b.lo, Fraction(1))
        while not (a.hi < b.lo or b.hi < a.lo):
            width /= 4
            a, b = a.refined(width), b.refined(width)
        return 1 if a.lo > b.hi else -1

    def __eq__(self, other) -> bool:
        if not isinstance(other, (AlgebraicNumber, int, Fraction)):
            return NotImplemented
        return self._cmp(other) == 0

    def __lt__(self, other) -> bool:
        if not isinstance(other, (AlgebraicNumber, int, Fraction)):
            return NotImplemented
        return self._cmp(other) < 0

    def __hash__(self) -> int:
        return hash(self.minimal_polynomial.coefficients)

    def __neg__(self) -> "AlgebraicNumber":
        cs = list(self.minimal_polynomial.coefficients)
        d = len(cs) - 1
        neg = [c * (-1) ** (d - i) for i, c in enumerate(cs)]
        return AlgebraicNumber(IntPolynomial.from_rational(neg), -self.hi, -self.lo)

    def __abs__(self) -> "AlgebraicNumber":
        return -self if self < 0 else self

    def __pow__(self, n: int) -> "AlgebraicNumber":
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        if n == 0:
            return AlgebraicNumber.from_rational(1)
        if self.is_rational():
            return AlgebraicNumber.from_rational(self.as_fraction() ** n)
        target = _squarefree(P.char_poly_coeffs(matpow(companion(self.minimal_polynomial), n)))
        a = self
        while True:
            ends = [a.lo**n, a.hi**n]
            lo, hi = min(ends), max(ends)
            if a.lo < 0 < a.hi:
                lo = min(lo, Fraction(0))
            if _roots_in_closed(target, lo, hi) == 1:
                return AlgebraicNumber.from_real_root(target, lo, hi)
            a = a.refined((a.hi - a.lo) / 4)

    def __repr__(self) -> str:
        return f"AlgebraicNumber({self.minimal_polynomial}, [{self.lo}, {self.hi}])"

    def __str__(self) -> str:
        if self.is_rational():
            return str(self.as_fraction())
        return f"root of {self.minimal_polynomial} near {self.approx()}"


def _max_abs_real_rooted(f: IntPolynomial) -> AlgebraicNumber:
    roots = P.isolate_real_roots(list(f.coefficients))
    hi_root = AlgebraicNumber.from_real_root(f, *roots[-1])
    lo_root = AlgebraicNumber.from_real_root(f, *roots[0])
    return max(abs(hi_root), abs(lo_root))


def _max_modulus(f: IntPolynomial) -> AlgebraicNumber:
    """Largest modulus among the roots of an irreducible polynomial."""
    cs = list(f.coefficients)
    if f.degree == 1:
        return abs(AlgebraicNumber.from_rational(Fraction(-cs[1], cs[0])))
    if P.count_real_roots(cs) == f.degree:
        return _max_abs_real_rooted(f)
    # products of root pairs are the eigenvalues of C (x) C; the largest real one is rho^2
    c = companion(f)
    n = len(c)
    kron = tuple(
        tuple(c[i // n][j // n] * c[i % n][j % n] for j in range(n * n)) for i in range(n * n)
    )
    r = P.char_poly_coeffs(kron)
    s = []  # S(z) = R(z^2)
    for coef in r:
        s.extend([coef, 0])
    s = s[:-1]
    sq = _squarefree(s)
    lo, hi = P.isolate_real_roots(sq, largest_only=True)[0]
    return AlgebraicNumber.from_real_root(IntPolynomial.from_rational(sq), lo, hi)


def dominant_root(p: IntPolynomial) -> AlgebraicNumber:
    """Maximum modulus of the roots of ``p``, as an exact real algebraic number."""
    if not isinstance(p, IntPolynomial):
        p = IntPolynomial.from_rational(p)
    if p.degree < 1:
        raise InputError("dominant_root needs a polynomial of degree at least 1")
    best = None
    for f, _ in P.factor(p):
        m = _max_modulus(f)
        if best is None or m > best:
            best = m
    return best
