"""Integer polynomials and exact root location.

Coefficient lists are stored highest degree first.  Internal helpers work on
plain lists of ``Fraction`` so that gcds and remainders stay exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Sequence

from toridyn.errors import InputError


@dataclass(frozen=True)
class IntPolynomial:
    coefficients: tuple[int, ...]

    def __post_init__(self):
        cs = tuple(self.coefficients)
        if not cs:
            raise InputError("polynomial needs at least one coefficient")
        if cs[0] == 0:
            raise InputError("leading coefficient must be nonzero")
        if not all(isinstance(c, int) for c in cs):
            if not all(Fraction(c).denominator == 1 for c in cs):
                raise InputError("coefficients must be integers")
            cs = tuple(int(c) for c in cs)
        object.__setattr__(self, "coefficients", cs)

    @classmethod
    def from_rational(cls, coeffs: Sequence) -> "IntPolynomial":
        """Primitive integer polynomial with the same roots as a rational one (positive leading coefficient)."""
        fs = _trim([Fraction(c) for c in coeffs])
        if not fs:
            raise InputError("zero polynomial has no roots to preserve")
        den = 1
        for c in fs:
            den = den * c.denominator // gcd(den, c.denominator)
        ints = [int(c * den) for c in fs]
        g = 0
        for c in ints:
            g = gcd(g, c)
        if ints[0] < 0:
            g = -g
        return cls(tuple(c // g for c in ints))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def leading(self) -> int:
        return self.coefficients[0]

    def is_monic(self) -> bool:
        return self.coefficients[0] == 1

    def __call__(self, x):
        acc = 0
        for c in self.coefficients:
            acc = acc * x + c
        return acc

    def __str__(self) -> str:
        return format_polynomial(self.coefficients)

    def content(self) -> int:
        g = 0
        for c in self.coefficients:
            g = gcd(g, c)
        return g


def format_polynomial(coeffs: Sequence[int], var: str = "x") -> str:
    d = len(coeffs) - 1
    parts = []
    for i, c in enumerate(coeffs):
        if c == 0:
            continue
        k = d - i
        mag = abs(c)
        if k == 0:
            body = str(mag)
        else:
            mono = var if k == 1 else f"{var}^{k}"
            body = mono if mag == 1 else f"{mag}*{mono}"
        sign = "-" if c < 0 else "+"
        parts.append((sign, body))
    if not parts:
        return "0"
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


# --- list arithmetic -------------------------------------------------------


def _trim(p: list) -> list:
    i = 0
    while i < len(p) and p[i] == 0:
        i += 1
    return p[i:]


def _deg(p: list) -> int:
    return len(p) - 1


def _add(p: list, q: list) -> list:
    if len(p) < len(q):
        p, q = q, p
    q = [0] * (len(p) - len(q)) + list(q)
    return _trim([a + b for a, b in zip(p, q)])


def _neg(p: list) -> list:
    return [-a for a in p]


def _sub(p: list, q: list) -> list:
    return _add(p, _neg(q))


def _mul(p: list, q: list) -> list:
    if not p or not q:
        return []
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return _trim(out)


def _scal(p: list, s) -> list:
    return _trim([s * a for a in p])


def _divmod(p: list, q: list) -> tuple[list, list]:
    q = _trim(q)
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    r = [Fraction(a) for a in _trim(p)]
    quot = [Fraction(0)] * max(len(r) - len(q) + 1, 0)
    lead = Fraction(q[0])
    while r and len(r) >= len(q):
        f = r[0] / lead
        k = len(r) - len(q)
        quot[len(quot) - 1 - k] = f
        for i, b in enumerate(q):
            r[i] -= f * b
        r = _trim(r)
    return _trim(quot), r


def _exact_div(p: list, q: list) -> list:
    quot, rem = _divmod(p, q)
    if rem:
        raise ArithmeticError("inexact polynomial division")
    return quot


def _monic(p: list) -> list:
    return [Fraction(a) / p[0] for a in p]


def _gcd(p: list, q: list) -> list:
    p, q = _trim(list(p)), _trim(list(q))
    while q:
        p, q = q, _divmod(p, q)[1]
    return _monic(p) if p else []


def _deriv(p: list) -> list:
    d = _deg(p)
    return _trim([a * (d - i) for i, a in enumerate(p[:-1])])


def _eval(p: list, x):
    acc = 0
    for c in p:
        acc = acc * x + c
    return acc


def _compose_reversal(p: list) -> list:
    """Reciprocal polynomial x^deg p(1/x)."""
    return _trim(list(reversed(p)))


def _strip_x(p: list) -> tuple[list, int]:
    k = 0
    while p and p[-1] == 0:
        p = p[:-1]
        k += 1
    return p, k


def _sign(x) -> int:
    return (x > 0) - (x < 0)


# --- characteristic polynomial ---------------------------------------------


def char_poly_coeffs(m) -> list:
    """Coefficients of det(xI - m), highest first, by Faddeev-LeVerrier.

    Rational entries are cleared by a common denominator D first: the k-th
    coefficient of D*m is D^k times that of m, and over the integers every
    division by k in the recurrence is exact.
    """
    n = len(m)
    if n == 0:
        return [1]
    den = 1
    for row in m:
        for x in row:
            d = Fraction(x).denominator
            den = den * d // gcd(den, d)
    a = [[int(Fraction(x) * den) for x in row] for row in m]
    coeffs = [1]
    am = a  # A M_1 with M_1 = I
    for k in range(1, n + 1):
        c = -sum(am[i][i] for i in range(n)) // k
        coeffs.append(c)
        if k == n:
            break
        mk = [row[:] for row in am]  # M_{k+1} = A M_k + c_k I
        for i in range(n):
            mk[i][i] += c
        am = [[sum(a[i][t] * mk[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
    if den == 1:
        return coeffs
    out = [Fraction(c, den**k) for k, c in enumerate(coeffs)]
    return [int(c) if c.denominator == 1 else c for c in out]


def char_poly(m) -> IntPolynomial:
    """Monic det(xI - m) for an integer matrix."""
    cs = char_poly_coeffs(m)
    if not all(isinstance(c, int) for c in cs):
        raise InputError("char_poly expects an integer matrix; use char_poly_coeffs for rationals")
    return IntPolynomial(tuple(cs))


# --- squarefree decomposition and factoring --------------------------------


def squarefree_decomposition(p: Sequence) -> list[tuple[list, int]]:
    """Yun's algorithm: ``p = c * prod s_i^i`` with monic squarefree coprime ``s_i``."""
    p = [Fraction(c) for c in _trim(list(p))]
    if _deg(p) < 1:
        return []
    out = []
    a = _gcd(p, _deriv(p))
    b = _exact_div(p, a)
    c = _exact_div(_deriv(p), a)
    d = _sub(c, _deriv(b))
    i = 1
    while _deg(b) >= 1:
        a = _gcd(b, d)
        b = _exact_div(b, a)
        c = _exact_div(d, a)
        d = _sub(c, _deriv(b))
        if _deg(a) >= 1:
            out.append((a, i))
        i += 1
    return out


def factor(p: IntPolynomial) -> list[tuple[IntPolynomial, int]]:
    """Irreducible factorization over Z (content dropped), factors with positive leading coefficient."""
    from sympy import Poly, symbols

    x = symbols("x")
    _, factors = Poly(list(p.coefficients), x, domain="ZZ").factor_list()
    out = []
    for f, mult in factors:
        cs = [int(c) for c in f.all_coeffs()]
        if cs[0] < 0:
            cs = [-c for c in cs]
        out.append((IntPolynomial(tuple(cs)), mult))
    out.sort(key=lambda fm: (fm[0].degree, fm[0].coefficients))
    return out


def rational_roots(p: IntPolynomial) -> list[Fraction]:
    """Distinct rational roots, descending."""
    roots = {Fraction(-f.coefficients[1], f.coefficients[0]) for f, _ in factor(p) if f.degree == 1}
    return sorted(roots, reverse=True)


# --- Sturm sequences and real roots ----------------------------------------


def _integral(p: list) -> list[int]:
    """Positive multiple of ``p`` with coprime integer coefficients (same signs everywhere)."""
    den = 1
    for c in p:
        d = Fraction(c).denominator
        den = den * d // gcd(den, d)
    ints = [int(Fraction(c) * den) for c in p]
    g = 0
    for c in ints:
        g = gcd(g, c)
    return [c // g for c in ints] if g else ints


def _sign_at(p: list[int], x: Fraction) -> int:
    """Sign of integer ``p`` at rational ``x``, from the homogenized value q^d p(n/q)."""
    n, q = x.numerator, x.denominator
    acc, qk = 0, 1
    for c in p:
        acc = acc * n + c * qk
        qk *= q
    return (acc > 0) - (acc < 0)


def sturm_sequence(p: Sequence) -> list[list[int]]:
    """Sturm sequence, each member scaled by a positive constant to integer coefficients."""
    p = [Fraction(c) for c in _trim(list(p))]
    seq = [p, _deriv(p)]
    while seq[-1]:
        r = _divmod(seq[-2], seq[-1])[1]
        if not r:
            break
        seq.append(_neg(r))
    return [_integral(s) for s in seq if s]


def _variations(signs: list[int]) -> int:
    signs = [s for s in signs if s]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def variations_at(seq: list[list], x) -> int:
    if x == "+inf":
        return _variations([_sign(s[0]) for s in seq])
    if x == "-inf":
        return _variations([_sign(s[0]) * (-1) ** _deg(s) for s in seq])
    x = Fraction(x)
    return _variations([_sign_at(s, x) for s in seq])


def cauchy_bound(p: Sequence) -> Fraction:
    p = [Fraction(c) for c in _trim(list(p))]
    return 1 + max((abs(c / p[0]) for c in p[1:]), default=Fraction(0))


def count_real_roots(p: Sequence, lo=None, hi=None) -> int:
    """Distinct real roots in the half-open interval (lo, hi]; ``None`` means infinite."""
    seq = sturm_sequence(p)
    if _deg(seq[0]) < 1:
        return 0
    a = "-inf" if lo is None else Fraction(lo)
    b = "+inf" if hi is None else Fraction(hi)
    return variations_at(seq, a) - variations_at(seq, b)


def isolate_real_roots(p: Sequence, largest_only: bool = False) -> list[tuple[Fraction, Fraction]]:
    """Closed isolating intervals for the distinct real roots, ascending.

    Each interval either is a single rational root ``(r, r)`` or has endpoints
    that are not roots and contains exactly one root in its interior.  With
    ``largest_only`` only the largest real root is isolated.
    """
    p = [Fraction(c) for c in _trim(list(p))]
    if _deg(p) < 1:
        return []
    sq = _integral(_exact_div(p, _gcd(p, _deriv(p))))
    seq = sturm_sequence(sq)
    bound = cauchy_bound(sq)
    out = []

    def v(x):
        return variations_at(seq, x)

    def rec(a, b, va, vb):
        n = va - vb
        if n == 0 or (largest_only and out):
            return
        if n == 1:
            if _sign_at(sq, b) == 0:
                out.append((b, b))
                return
            # shrink away from a left endpoint that is itself a root
            while _sign_at(sq, a) == 0:
                m = (a + b) / 2
                if _sign_at(sq, m) == 0:
                    out.append((m, m))
                    return
                vm = v(m)
                if vm - vb == 1:
                    a, va = m, vm
                else:
                    b, vb = m, vm
            out.append((a, b))
            return
        m = (a + b) / 2
        vm = v(m)
        if largest_only:
            rec(m, b, vm, vb)
            rec(a, m, va, vm)
        else:
            rec(a, m, va, vm)
            rec(m, b, vm, vb)

    rec(-bound, bound, v(-bound), v(bound))
    return sorted(out)


def refine_root(p: Sequence, lo: Fraction, hi: Fraction, width: Fraction) -> tuple[Fraction, Fraction]:
    """Bisect an isolating interval of a simple root down to ``hi - lo <= width``."""
    if lo == hi:
        return lo, hi
    p = _integral(_trim(list(p)))
    s_lo = _sign_at(p, Fraction(lo))
    while hi - lo > width:
        m = (lo + hi) / 2
        s = _sign_at(p, m)
        if s == 0:
            return m, m
        if s == s_lo:
            lo = m
        else:
            hi = m
    return lo, hi


# --- unit-disk root counting -------------------------------------------------


def _cauchy_index(f1: list, f0: list) -> int:
    """Cauchy index of f1/f0 over the real line via the signed remainder sequence."""
    f1 = _trim(list(f1))
    f0 = _trim(list(f0))
    if not f1:
        return 0
    seq = [f0, f1]
    while True:
        r = _divmod(seq[-2], seq[-1])[1]
        if not r:
            break
        seq.append(_neg(r))
    return variations_at(seq, "-inf") - variations_at(seq, "+inf")


def _open_disk_count(h: list) -> int:
    """Roots of ``h`` with |z| < 1, assuming none lie on the unit circle."""
    d = _deg(h)
    if d < 1:
        return 0
    asc = list(reversed(h))
    q = []  # q(w) = sum a_k (1+w)^k (1-w)^(d-k), highest first
    for k, a in enumerate(asc):
        if a:
            term = [Fraction(a)]
            for _ in range(k):
                term = _mul(term, [1, 1])
            for _ in range(d - k):
                term = _mul(term, [-1, 1])
            q = _add(q, term)
    q_asc = list(reversed(q))
    # q(iy) = A(y) + i B(y)
    a_asc = [0] * len(q_asc)
    b_asc = [0] * len(q_asc)
    for k, c in enumerate(q_asc):
        if k % 2 == 0:
            a_asc[k] = c * (-1) ** (k // 2)
        else:
            b_asc[k] = c * (-1) ** ((k - 1) // 2)
    big_a = _trim(list(reversed(a_asc)))
    big_b = _trim(list(reversed(b_asc)))
    if d % 2 == 0:
        diff = -_cauchy_index(big_b, big_a)
    else:
        diff = _cauchy_index(big_a, big_b)
    return (d + diff) // 2


def _dickson_reduction(g: list) -> list:
    """For palindromic g of degree 2m return G with g(z) = z^m G(z + 1/z)."""
    asc = list(reversed(g))
    m = len(asc) // 2
    d_prev, d_cur = [Fraction(2)], [Fraction(1), Fraction(0)]
    big_g = [Fraction(asc[m])]
    for k in range(1, m + 1):
        if k == 1:
            dk = d_cur
        else:
            dk = _sub(_mul([1, 0], d_cur), d_prev)
            d_prev, d_cur = d_cur, dk
        big_g = _add(big_g, _scal(dk, asc[m + k]))
    return big_g


def _closed_disk_count_squarefree(s: list) -> int:
    s, k = _strip_x(s)
    count = k
    if _deg(s) < 1:
        return count
    g = _gcd(s, _compose_reversal(s))
    h = _exact_div(s, g) if _deg(g) >= 1 else s
    count += _open_disk_count(h)
    if _deg(g) < 1:
        return count
    for lin in ([1, -1], [1, 1]):
        if _eval(g, -lin[1]) == 0:
            g = _exact_div(g, lin)
            count += 1
    dg = _deg(g)
    if dg >= 1:
        big_g = _dickson_reduction(g)
        on_circle = 2 * (count_real_roots(big_g, -2, 2) - (1 if _eval(big_g, 2) == 0 else 0))
        count += on_circle + (dg - on_circle) // 2
    return count


def count_roots_in_closed_unit_disk(p) -> int:
    """Roots of ``p`` (with multiplicity) of modulus at most 1, exactly."""
    cs = p.coefficients if isinstance(p, IntPolynomial) else p
    cs = [Fraction(c) for c in _trim(list(cs))]
    if not cs:
        raise InputError("zero polynomial")
    return sum(mult * _closed_disk_count_squarefree(s) for s, mult in squarefree_decomposition(cs))


# --- cyclotomic polynomials and Kronecker's test ------------------------------


@lru_cache(maxsize=None)
def cyclotomic(m: int) -> tuple[int, ...]:
    """Coefficients of the m-th cyclotomic polynomial."""
    num = [1] + [0] * (m - 1) + [-1]
    for d in range(1, m):
        if m % d == 0:
            num = _exact_div(num, list(cyclotomic(d)))
    return tuple(int(c) for c in num)


def _totient(m: int) -> int:
    result, n, f = m, m, 2
    while f * f <= n:
        if n % f == 0:
            while n % f == 0:
                n //= f
            result -= result // f
        f += 1
    if n > 1:
        result -= result // n
    return result


def cyclotomic_factorization(p: IntPolynomial) -> tuple[int, list[int]] | None:
    """Write monic ``p`` as ``x^k * prod Phi_m``; returns ``(k, [m, ...])`` or ``None``."""
    cs, k = _strip_x(list(p.coefficients))
    if abs(cs[-1]) != 1:
        return None
    indices = []
    rem = [Fraction(c) for c in cs]
    deg = _deg(rem)
    m = 1
    while _deg(rem) >= 1 and m <= 2 * deg * deg + 2:
        if _totient(m) <= _deg(rem):
            phi = list(cyclotomic(m))
            while _deg(rem) >= len(phi) - 1:
                quot, r = _divmod(rem, phi)
                if r:
                    break
                rem = quot
                indices.append(m)
        m += 1
    if _deg(rem) >= 1:
        return None
    return k, indices


def kronecker_all_roots_unit(p: IntPolynomial) -> bool:
    """True iff every root of monic ``p`` is zero or a root of unity."""
    if not isinstance(p, IntPolynomial):
        p = IntPolynomial(tuple(p))
    if not p.is_monic():
        raise InputError("kronecker_all_roots_unit expects a monic polynomial")
    return cyclotomic_factorization(p) is not None
