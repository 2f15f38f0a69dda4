"""Exact combinatorics of the symmetric split map on binary forms.

Binary forms of degree ``d`` in ``(v0, v1)`` are stored as coefficient
sequences where entry ``k`` multiplies ``v0**(d-k) * v1**k``.  The split map
sends a form of degree ``2m`` to ``M_m (x) M_m`` by symmetrizing it into
``S^{2m}(V)`` and cutting the tensor slots into two blocks of ``m``.

All exact values are :class:`fractions.Fraction`; complex work uses mpmath at
an explicit binary precision.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath

__all__ = [
    "BinaryForm",
    "DomainError",
    "RotatedFrame",
    "SplitCoefficients",
    "SplitTensor",
    "apply_f5",
    "binom",
    "coefficient_inequalities",
    "coefficient_table_csv",
    "format_rational",
    "frame_to_standard",
    "parse_rational",
    "rotated_frame_coeffs",
    "split_coefficients",
    "split_monomial",
]

DEFAULT_PRECISION = 256


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


def binom(n: int, k: int) -> int:
    if n < 0 or k < 0:
        raise DomainError(f"binom({n}, {k}): arguments must be nonnegative")
    if k > n:
        raise DomainError(f"binom({n}, {k}): k exceeds n")
    return math.comb(n, k)


def format_rational(q: Fraction) -> str:
    """Serialize as ``"p/q"`` (always with an explicit denominator)."""
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text: str | int) -> Fraction:
    if isinstance(text, int):
        return Fraction(text)
    p, sep, q = str(text).strip().partition("/")
    return Fraction(int(p), int(q) if sep else 1)


@dataclass(frozen=True)
class SplitCoefficients:
    """The rationals ``b_{m,0..m}`` with
    ``f5(v0^m v1^m) = sum_l b[l] * v0^l v1^(m-l) (x) v0^(m-l) v1^l``."""

    m: int
    values: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.values) != self.m + 1:
            raise ValueError("need m+1 coefficients")

    def __getitem__(self, l: int) -> Fraction:
        return self.values[l]

    def __len__(self) -> int:
        return len(self.values)

    def scaled(self) -> tuple[int, ...]:
        """``C(2m,m) * b[l]``; raises if any entry is not integral."""
        c = binom(2 * self.m, self.m)
        out = []
        for v in self.values:
            x = c * v
            if x.denominator != 1:
                raise ArithmeticError(f"C(2m,m)*b = {x} is not an integer (m={self.m})")
            out.append(x.numerator)
        return tuple(out)

    def as_mpf(self, prec: int = DEFAULT_PRECISION) -> list:
        with mpmath.workprec(prec):
            return [mpmath.mpf(v.numerator) / v.denominator for v in self.values]


@dataclass(frozen=True)
class SplitTensor:
    """Dense element of ``M_m (x) M_m``.

    ``matrix[a][b]`` multiplies ``v0^(m-a) v1^a (x) v0^(m-b) v1^b``.
    """

    m: int
    matrix: tuple[tuple[Fraction, ...], ...]

    @classmethod
    def zero(cls, m: int) -> "SplitTensor":
        row = (Fraction(0),) * (m + 1)
        return cls(m, (row,) * (m + 1))

    def __add__(self, other: "SplitTensor") -> "SplitTensor":
        self._check(other)
        return SplitTensor(self.m, tuple(
            tuple(x + y for x, y in zip(r1, r2)) for r1, r2 in zip(self.matrix, other.matrix)
        ))

    def scale(self, c) -> "SplitTensor":
        return SplitTensor(self.m, tuple(tuple(c * x for x in row) for row in self.matrix))

    def entries(self) -> dict[tuple[int, int], Fraction]:
        """Nonzero entries keyed by ``(a, b)``."""
        return {(a, b): x for a, row in enumerate(self.matrix) for b, x in enumerate(row) if x}

    def evaluate(self, first: tuple, second: tuple):
        """Evaluate at ``(v0, v1)`` in the first factor and ``(v0', v1')`` in the second."""
        m = self.m
        p0, p1 = first
        q0, q1 = second
        total = 0
        for (a, b), x in self.entries().items():
            total += x * p0 ** (m - a) * p1 ** a * q0 ** (m - b) * q1 ** b
        return total

    def _check(self, other):
        if self.m != other.m:
            raise DomainError("tensor orders differ")


@dataclass(frozen=True)
class BinaryForm:
    degree: int
    coefficients: tuple

    def __post_init__(self):
        if self.degree < 0 or len(self.coefficients) != self.degree + 1:
            raise ValueError("BinaryForm needs degree+1 coefficients")

    @classmethod
    def monomial(cls, degree: int, k: int, coefficient=1) -> "BinaryForm":
        coeffs = [Fraction(0)] * (degree + 1)
        coeffs[k] = Fraction(coefficient)
        return cls(degree, tuple(coeffs))

    def __call__(self, v0, v1):
        d = self.degree
        return sum(c * v0 ** (d - k) * v1 ** k for k, c in enumerate(self.coefficients))


def split_monomial(m: int, l: int) -> SplitTensor:
    """``f5(C(2m,l) * v0^(2m-l) v1^l)`` exactly.

    Two index conventions, one for each half of the range of ``l``; both put
    ``C(m,a) C(m,b)`` on every split ``(a, b)`` with ``a + b = l``.
    """
    if m < 1:
        raise DomainError("m must be positive")
    if not 0 <= l <= 2 * m:
        raise DomainError(f"l={l} outside 0..{2 * m}")
    grid = [[Fraction(0)] * (m + 1) for _ in range(m + 1)]
    if l <= m:
        for l1 in range(l + 1):
            # v0^(m-l+l1) v1^(l-l1) (x) v0^(m-l1) v1^l1
            c = math.comb(m, l1) * math.comb(m, l - l1)
            grid[l - l1][l1] += c
    else:
        for l1 in range(l, 2 * m + 1):
            # v0^(2m-l1) v1^(l1-m) (x) v0^(l1-l) v1^(m+l-l1)
            c = (math.factorial(m) // (math.factorial(2 * m - l1) * math.factorial(l1 - m))) * (
                math.factorial(m) // (math.factorial(l1 - l) * math.factorial(m + l - l1))
            )
            grid[l1 - m][m + l - l1] += c
    return SplitTensor(m, tuple(tuple(r) for r in grid))


def split_coefficients(m: int) -> SplitCoefficients:
    """``b_{m,l}`` read off the ``l = m`` split, divided by ``C(2m, m)``.

    Only the anti-diagonal of :func:`split_monomial` is populated at
    ``l = m``, so it is evaluated directly rather than via the dense grid.
    """
    if m < 1:
        raise DomainError("m must be positive")
    norm = math.comb(2 * m, m)
    # l1 runs over the second-factor v1 power; b_{m,l} sits at l1 = l.
    vals = tuple(Fraction(math.comb(m, l1) * math.comb(m, m - l1), norm) for l1 in range(m + 1))
    return SplitCoefficients(m, vals)


def apply_f5(form: BinaryForm) -> SplitTensor:
    if form.degree % 2:
        raise DomainError(f"odd degree {form.degree}")
    m = form.degree // 2
    if m == 0:
        raise DomainError("degree 0 form has no split")
    out = SplitTensor.zero(m)
    for k, c in enumerate(form.coefficients):
        if c:
            if isinstance(c, (int, Fraction)):
                c = Fraction(c)
            out = out + split_monomial(m, k).scale(c / math.comb(2 * m, k))
    return out


def coefficient_inequalities(m: int) -> dict[str, bool]:
    """Exact check of the two bounds on ``C(m,l) / C(2m,l)``.

    ``head``: ratio <= 2^-l for 0 <= l <= m.
    ``tail``: ratio <= (3/2)^(m/2) * 3^-l for floor(m/2)+1 <= l <= m,
    compared after squaring so the half-integer power stays rational.
    """
    head = tail = True
    for l in range(m + 1):
        r = Fraction(math.comb(m, l), math.comb(2 * m, l))
        if r > Fraction(1, 2 ** l):
            head = False
        if l >= m // 2 + 1 and r * r > Fraction(3 ** m, 2 ** m) / 3 ** (2 * l):
            tail = False
    return {"head": head, "tail": tail}


def coefficient_table_csv(ms: Sequence[int]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["m", "l", "numerator", "denominator"])
    for m in ms:
        for l, v in enumerate(split_coefficients(m).values):
            w.writerow([m, l, v.numerator, v.denominator])
    return buf.getvalue()


# -- rotated frames -------------------------------------------------------


@dataclass(frozen=True)
class RotatedFrame:
    """Coefficients of ``v0^m v1^m`` in the unitary frame adapted to ``rho``.

    ``coeffs[i]`` multiplies ``X^(2m-i) Y^i`` with
    ``X = (conj(rho) v1 + v0) / sqrt(1+|rho|^2)`` and
    ``Y = (v1 - rho v0) / sqrt(1+|rho|^2)``; ``Y`` vanishes where ``v1/v0 = rho``.
    """

    m: int
    rho: object
    coeffs: tuple
    precision: int


def _poly_mul(a: list, b: list) -> list:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _poly_pow(a: list, n: int) -> list:
    result = [1]
    base = list(a)
    while n:
        if n & 1:
            result = _poly_mul(result, base)
        n >>= 1
        if n:
            base = _poly_mul(base, base)
    return result


def rotated_frame_coeffs(m: int, rho, prec: int = DEFAULT_PRECISION) -> RotatedFrame:
    if m < 1:
        raise DomainError("m must be positive")
    with mpmath.workprec(prec):
        r = mpmath.mpc(rho)
        if not mpmath.isfinite(r):
            raise DomainError("rho must be finite")
        n2 = abs(r) ** 2
        trinomial = [r, 1 - n2, -mpmath.conj(r)]  # in powers of Y/X
        coeffs = [c / (1 + n2) ** m for c in _poly_pow(trinomial, m)]
    return RotatedFrame(m, r, tuple(coeffs), prec)


def frame_to_standard(frame: RotatedFrame) -> list:
    """Expand ``sum_i c_i X^(2m-i) Y^i`` back into the ``(v0, v1)`` basis."""
    m, r = frame.m, frame.rho
    with mpmath.workprec(frame.precision):
        k = 1 / mpmath.sqrt(1 + abs(r) ** 2)
        X = [k, k * mpmath.conj(r)]  # v0, v1 coefficients
        Y = [-k * r, k]
        total = [mpmath.mpc(0)] * (2 * m + 1)
        for i, c in enumerate(frame.coeffs):
            term = _poly_mul(_poly_pow(X, 2 * m - i), _poly_pow(Y, i))
            for j, x in enumerate(term):
                total[j] += c * x
    return total
