"""Exact arithmetic in ``Q(t)[w] / (P)`` and Laurent expansion in ``t``.

Bivariate polynomials live in the sympy ring ``Q[t, w]`` (:data:`R2`), base
rational functions in the field ``Q(t)`` (:data:`QT`).  Elements of the
function field of a curve ``P(t, w) = 0`` are reduced coefficient vectors
``(c_0, ..., c_{d-1})`` with ``c_k`` in ``Q(t)`` multiplying ``w^k``.
"""

from __future__ import annotations

from fractions import Fraction

from sympy import QQ
from sympy.polys.fields import field

from .exactkernel import DomainError

__all__ = [
    "F2",
    "QT",
    "R2",
    "CurveAlgebra",
    "T",
    "TW",
    "W",
    "laurent_coefficients",
    "qt_coeffs",
    "qt_from_coeffs",
    "qt_reverse",
    "to_fraction",
]

F2, _FT, _FW = field("t,w", QQ)
R2 = F2.ring
TW, W = R2.gens
QT, T = field("t", QQ)
_RT = QT.ring
_T1 = _RT.gens[0]


def to_fraction(c) -> Fraction:
    return Fraction(int(c.numerator), int(c.denominator))


def qt_from_coeffs(coeffs) -> object:
    """Polynomial in ``t`` (ascending coefficients) as an element of ``Q(t)``."""
    p = _RT.zero
    for j, c in enumerate(coeffs):
        if c:
            c = Fraction(c)
            p += _RT(QQ(c.numerator, c.denominator)) * _T1 ** j
    return QT(p)


def _poly_coeffs(p) -> list[Fraction]:
    """Ascending coefficients of a univariate ``Q[t]`` polynomial."""
    if not p:
        return []
    out = [Fraction(0)] * (p.degree() + 1)
    for (j,), c in p.terms():
        out[j] = to_fraction(c)
    return out


def qt_coeffs(f) -> tuple[list[Fraction], list[Fraction]]:
    """``(numerator, denominator)`` ascending coefficient lists of ``f`` in ``Q(t)``."""
    return _poly_coeffs(f.numer), _poly_coeffs(f.denom)


def qt_reverse(f):
    """``f(1/t)`` written again as a ratio of polynomials."""
    num, den = qt_coeffs(f)
    if not num:
        return QT.zero
    shift = (len(den) - 1) - (len(num) - 1)
    out = qt_from_coeffs(num[::-1]) / qt_from_coeffs(den[::-1])
    return out * T ** shift if shift >= 0 else out / T ** (-shift)


def _series_div(num: list[Fraction], den: list[Fraction], n: int) -> list[Fraction]:
    """First ``n`` power-series coefficients of ``num/den`` with ``den[0] != 0``."""
    out = []
    inv0 = 1 / den[0]
    for k in range(n):
        acc = num[k] if k < len(num) else Fraction(0)
        for j in range(1, min(k, len(den) - 1) + 1):
            acc -= den[j] * out[k - j]
        out.append(acc * inv0)
    return out


def _valuation(c: list[Fraction]) -> int:
    for k, x in enumerate(c):
        if x:
            return k
    raise DomainError("zero polynomial has no valuation")


def laurent_coefficients(f, upto: int) -> tuple[int, list[Fraction]]:
    """Laurent expansion of ``f`` at ``t = 0``.

    Returns ``(v, coeffs)`` with ``f = sum_k coeffs[k] * t^(v+k)`` covering all
    exponents ``v <= e <= upto``.
    """
    num, den = qt_coeffs(f)
    if not num:
        return upto + 1, []
    vn, vd = _valuation(num), _valuation(den)
    v = vn - vd
    n = upto - v + 1
    if n <= 0:
        return v, []
    return v, _series_div(num[vn:], den[vd:], n)


def laurent_coefficient(f, k: int) -> Fraction:
    v, c = laurent_coefficients(f, k)
    return c[k - v] if v <= k else Fraction(0)


class CurveAlgebra:
    """The algebra ``Q(t)[w] / P`` for ``P`` monic in ``w``."""

    def __init__(self, P):
        self.P = P
        self.d = P.degree(1)
        if self.d < 1:
            raise DomainError("P must have positive degree in w")
        lc = self._w_coeffs(P)
        if lc[-1] != QT.one:
            raise DomainError("P must be monic in w")
        self.low = lc[:-1]  # a_0..a_{d-1} with w^d = -sum a_k w^k
        self._psums = None

    # conversions

    @staticmethod
    def _w_coeffs(p) -> list:
        n = p.degree(1) if p else 0
        cols = [_RT.zero for _ in range(max(n, 0) + 1)]
        for (i, j), c in p.terms():
            cols[j] += _RT(c) * _T1 ** i
        return [QT(c) for c in cols]

    def from_poly(self, p) -> tuple:
        """Reduce a polynomial of ``Q[t, w]``."""
        return self.reduce(self._w_coeffs(p))

    def from_rational(self, num, den) -> tuple:
        a = self.from_poly(num)
        if den.degree(1) <= 0:
            return self.scale(a, 1 / self._w_coeffs(den)[0])
        return self.mul(a, self.inv(self.from_poly(den)))

    def reduce(self, coeffs) -> tuple:
        c = list(coeffs)
        d = self.d
        for k in range(len(c) - 1, d - 1, -1):
            top = c[k]
            if top:
                for j in range(d):
                    c[k - d + j] -= top * self.low[j]
            c[k] = QT.zero
        c += [QT.zero] * (d - len(c))
        return tuple(c[:d])

    # ring operations

    def one(self) -> tuple:
        return (QT.one,) + (QT.zero,) * (self.d - 1)

    def w(self) -> tuple:
        return self.reduce([QT.zero, QT.one])

    def add(self, a, b) -> tuple:
        return tuple(x + y for x, y in zip(a, b))

    def scale(self, a, c) -> tuple:
        return tuple(c * x for x in a)

    def mul(self, a, b) -> tuple:
        prod = [QT.zero] * (2 * self.d - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        return self.reduce(prod)

    def pow(self, a, n: int) -> tuple:
        if n < 0:
            return self.pow(self.inv(a), -n)
        result, base = self.one(), a
        while n:
            if n & 1:
                result = self.mul(result, base)
            n >>= 1
            if n:
                base = self.mul(base, base)
        return result

    def inv(self, a) -> tuple:
        """Inverse by solving ``M_a x = 1`` with ``M_a`` the multiplication matrix."""
        d = self.d
        cols = [a]
        for _ in range(d - 1):
            cols.append(self.mul(cols[-1], self.w()))
        M = [[cols[j][i] for j in range(d)] + [QT.one if i == 0 else QT.zero] for i in range(d)]
        for c in range(d):
            piv = next((r for r in range(c, d) if M[r][c]), None)
            if piv is None:
                raise DomainError("element is a zero divisor modulo P (denominator shares a factor with P)")
            M[c], M[piv] = M[piv], M[c]
            inv_p = 1 / M[c][c]
            M[c] = [x * inv_p for x in M[c]]
            for r in range(d):
                if r != c and M[r][c]:
                    f = M[r][c]
                    M[r] = [x - f * y for x, y in zip(M[r], M[c])]
        return tuple(M[i][d] for i in range(d))

    # traces

    def power_sums(self) -> list:
        """``Tr(w^k)`` for ``0 <= k < d`` by Newton's identities."""
        if self._psums is None:
            d, a = self.d, self.low
            p = [QT(d)]
            for k in range(1, d):
                acc = -k * a[d - k]
                for i in range(1, k):
                    acc -= a[d - i] * p[k - i]
                p.append(acc)
            self._psums = p
        return self._psums

    def trace(self, a):
        return sum((x * p for x, p in zip(a, self.power_sums())), QT.zero)

    def trace_over_pw(self, a):
        """``Tr(a / P_w)``: for reduced ``a`` this is its ``w^(d-1)`` coefficient."""
        return a[-1]
