"""Toy algebraic covers ``P(t, w) = 0`` of the ``t``-line.

A :class:`CoverModel` carries the defining polynomial (monic in ``w``), the
kernel coordinate ``tau``, the scale ``s`` (``z = t / s``) and a differential
family ``(u_j, e_j)`` with ``sum u_j e_j = 0``.  Exact traces go through
:class:`~antider_kit.algebra.CurveAlgebra`; numeric ones sum over fibers
found with ``mpmath.polyroots``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import mpmath
import sympy
from sympy import QQ

from .algebra import (
    F2,
    R2,
    T,
    CurveAlgebra,
    TW,
    W,
    qt_coeffs,
    qt_reverse,
)
from .exactkernel import DomainError, parse_rational
from .plocal import AnchorSet
from .textdoc import DocumentError, parse_document

__all__ = [
    "AttestationReport",
    "BiRational",
    "CoverModel",
    "CoverPoint",
    "DifferentialFamily",
    "PrecisionError",
    "TraceExpansion",
    "VanishingPolynomial",
    "attest_conditions",
    "canonical_model",
    "corpus_models",
    "euler_derivation",
    "fiber",
    "inversion_pullback",
    "load_model",
    "model_from_document",
    "scaled_model",
    "power_form_model",
    "trace_exact",
    "trace_expansion",
    "trace_numeric",
    "vanishing_polynomial",
]


class PrecisionError(ArithmeticError):
    """Fiber roots could not be separated; ``suggested`` is a precision to retry with."""

    def __init__(self, message: str, suggested: int):
        super().__init__(f"{message} (suggested precision: {suggested} bits)")
        self.suggested = suggested


# -- bivariate rational functions ----------------------------------------------


def _coerce_poly(obj):
    """Polynomial of ``Q[t, w]`` from coefficient lists ``c[k][j]`` (of ``w^k t^j``),
    a sympy-parsable string, or an existing ring/field element."""
    if isinstance(obj, str):
        f = F2.from_expr(sympy.sympify(obj, locals={"t": sympy.Symbol("t"), "w": sympy.Symbol("w")}))
        if f.denom.degree(0) > 0 or f.denom.degree(1) > 0:
            raise DomainError(f"{obj!r} is not a polynomial")
        return f.numer.mul_ground(QQ(1) / f.denom.LC)
    if isinstance(obj, (int, Fraction)):
        obj = [[obj]]
    if isinstance(obj, (list, tuple)):
        p = R2.zero
        for k, row in enumerate(obj):
            if isinstance(row, (int, str, Fraction)):
                row = [row]
            for j, c in enumerate(row):
                c = parse_rational(c) if isinstance(c, str) else Fraction(c)
                if c:
                    p += R2(QQ(c.numerator, c.denominator)) * TW ** j * W ** k
        return p
    if hasattr(obj, "ring") and obj.ring == R2:
        return obj
    raise TypeError(f"cannot build a polynomial from {type(obj).__name__}")


def _compile(p, prec: int):
    with mpmath.workprec(prec):
        return [(i, j, mpmath.mpf(int(c.numerator)) / int(c.denominator)) for (i, j), c in p.terms()]


def _eval_terms(terms, t, w):
    total = mpmath.mpc(0)
    for i, j, c in terms:
        total += c * t ** i * w ** j
    return total


@dataclass(frozen=True, eq=False)
class BiRational:
    """Rational function of ``(t, w)`` over ``Q``."""

    expr: object  # element of F2

    @classmethod
    def of(cls, obj) -> "BiRational":
        if isinstance(obj, BiRational):
            return obj
        if hasattr(obj, "field") and obj.field == F2:
            return cls(obj)
        if isinstance(obj, str):
            return cls(F2.from_expr(sympy.sympify(obj, locals={"t": sympy.Symbol("t"), "w": sympy.Symbol("w")})))
        return cls(F2(_coerce_poly(obj)))

    @classmethod
    def ratio(cls, num, den) -> "BiRational":
        return cls(F2(_coerce_poly(num)) / F2(_coerce_poly(den)))

    @property
    def num(self):
        return self.expr.numer

    @property
    def den(self):
        return self.expr.denom

    @property
    def is_polynomial(self) -> bool:
        return self.den.degree(0) <= 0 and self.den.degree(1) <= 0

    def __add__(self, other):
        return BiRational(self.expr + BiRational.of(other).expr)

    def __sub__(self, other):
        return BiRational(self.expr - BiRational.of(other).expr)

    def __mul__(self, other):
        return BiRational(self.expr * BiRational.of(other).expr)

    def __neg__(self):
        return BiRational(-self.expr)

    def __pow__(self, n: int):
        return BiRational(self.expr ** n)

    def is_zero(self) -> bool:
        return not self.expr

    def diff_t(self) -> "BiRational":
        return BiRational(self.expr.diff(F2.gens[0]))

    def diff_w(self) -> "BiRational":
        return BiRational(self.expr.diff(F2.gens[1]))

    def _terms(self, prec: int):
        cache = self.__dict__.setdefault("_cache", {})
        if prec not in cache:
            cache[prec] = (_compile(self.num, prec), _compile(self.den, prec))
        return cache[prec]

    def __call__(self, t, w, prec: int = 256):
        num, den = self._terms(prec)
        with mpmath.workprec(prec):
            t, w = mpmath.mpc(t), mpmath.mpc(w)
            dv = _eval_terms(den, t, w)
            if dv == 0:
                raise DomainError(f"pole at (t, w) = ({mpmath.nstr(t, 15)}, {mpmath.nstr(w, 15)})")
            return _eval_terms(num, t, w) / dv

    def __str__(self) -> str:
        return str(self.expr)


@dataclass
class DifferentialFamily:
    """Pairs ``(u_j, e_j)`` with ``sum_j u_j e_j = 0`` on the curve; ``omega = sum u_j de_j``."""

    pairs: list
    bound: float = 1.0

    def __post_init__(self):
        self.pairs = [(BiRational.of(u), BiRational.of(e)) for u, e in self.pairs]
        if len(self.pairs) < 1:
            raise DomainError("family needs at least one pair")

    @property
    def u(self) -> list:
        return [p[0] for p in self.pairs]

    @property
    def e(self) -> list:
        return [p[1] for p in self.pairs]

    def null_sum(self) -> BiRational:
        total = BiRational(F2.zero)
        for u, e in self.pairs:
            total = total + u * e
        return total

    @classmethod
    def paired(cls, f, g, bound: float = 1.0) -> "DifferentialFamily":
        """``u = (f, -g)``, ``e = (g, f)``, so ``omega = f dg - g df``."""
        f, g = BiRational.of(f), BiRational.of(g)
        return cls([(f, g), (-g, f)], bound)


@dataclass(frozen=True)
class CoverPoint:
    t: object
    w: object


@dataclass
class CoverModel:
    P: object  # monic in w, element of R2
    tau: BiRational
    scale: Fraction = Fraction(1)
    family: DifferentialFamily | None = None
    n1: int | None = None
    name: str = "model"
    precision: int = 256
    validate: bool = True

    def __post_init__(self):
        self.P = _coerce_poly(self.P)
        self.tau = BiRational.of(self.tau)
        self.scale = Fraction(self.scale)
        if self.scale <= 0:
            raise DomainError("scale s must be positive")
        self.algebra  # monic check
        if self.n1 is None:
            self.n1 = self.d
        if self.validate:
            self._validate()

    def _validate(self):
        with mpmath.workprec(self.precision):
            roots = fiber(self, 0)
        if any(mult > 1 for _, mult in roots):
            raise DomainError(f"{self.name}: fiber over t=0 is ramified")
        for w0, _ in roots:
            if _eval_terms(self.tau._terms(self.precision)[1], mpmath.mpc(0), w0) == 0:
                raise DomainError(f"{self.name}: tau has a pole on the fiber over t=0")
        if self.family is not None:
            nul = self.family.null_sum()
            if not nul.is_zero():
                red = self.algebra.from_rational(nul.num, nul.den)
                if any(red):
                    raise DomainError(f"{self.name}: family violates sum u_j e_j = 0")

    @cached_property
    def algebra(self) -> CurveAlgebra:
        return CurveAlgebra(self.P)

    @property
    def d(self) -> int:
        return self.algebra.d

    @cached_property
    def P_t(self) -> BiRational:
        return BiRational(F2(self.P.diff(TW)))

    @cached_property
    def P_w(self) -> BiRational:
        return BiRational(F2(self.P.diff(W)))

    def w_coeffs_at(self, t) -> list:
        """Coefficients of ``P(t, .)`` in descending powers of ``w`` (numeric)."""
        out = [mpmath.mpc(0)] * (self.d + 1)
        t = mpmath.mpc(t)
        for (i, j), c in self.P.terms():
            out[self.d - j] += mpmath.mpf(int(c.numerator)) / int(c.denominator) * t ** i
        return out

    def dw_dt(self, t, w):
        """Slope of the sheet through ``(t, w)``: ``-P_t / P_w``."""
        pt = self.P_t(t, w, mpmath.mp.prec)
        pw = self.P_w(t, w, mpmath.mp.prec)
        if pw == 0:
            raise DomainError("ramified point: P_w vanishes")
        return -pt / pw

    def curve_derivative(self, f: BiRational, t, w):
        """``d/dt f(t, w(t))`` along the sheet through ``(t, w)``."""
        prec = mpmath.mp.prec
        return f.diff_t()(t, w, prec) + f.diff_w()(t, w, prec) * self.dw_dt(t, w)

    @cached_property
    def omega_dt(self) -> BiRational:
        """``omega / dt = sum_j u_j (e_{j,t} - e_{j,w} P_t / P_w)``."""
        if self.family is None:
            raise DomainError(f"{self.name}: no differential family")
        pt, pw = self.P_t.expr, self.P_w.expr
        total = F2.zero
        for u, e in self.family.pairs:
            total += u.expr * (e.expr.diff(F2.gens[0]) - e.expr.diff(F2.gens[1]) * pt / pw)
        return BiRational(total)

    def omega_dz(self) -> BiRational:
        return BiRational(self.omega_dt.expr * self.scale.numerator / self.scale.denominator)

    def describe(self) -> dict:
        return {"name": self.name, "P": str(self.P), "tau": str(self.tau), "scale": str(self.scale),
                "d": self.d, "n1": self.n1,
                "family": [[str(u), str(e)] for u, e in self.family.pairs] if self.family else []}


# -- fibers and traces ---------------------------------------------------------------


def fiber(model: CoverModel, alpha, prec: int | None = None, max_prec: int = 4096) -> list:
    """Roots of ``P(alpha, w)`` as ``[(w, multiplicity), ...]``.

    Roots closer than ``2^(-prec/4)`` are recomputed at doubled precision; a
    cluster that survives the doubling is a multiple root.
    """
    prec = prec or mpmath.mp.prec
    first = _clustered_roots(model, alpha, prec, max_prec)
    if all(mult == 1 for _, mult in first):
        return first
    second = _clustered_roots(model, alpha, 2 * prec, max_prec)
    if len(second) == len(first):
        return [(mpmath.mpc(w), m) for w, m in first]
    return second


def _clustered_roots(model, alpha, prec, max_prec):
    if prec > max_prec:
        raise PrecisionError("fiber roots not separated within the precision ceiling", 2 * max_prec)
    with mpmath.workprec(prec):
        coeffs = model.w_coeffs_at(alpha)
        if all(c == 0 for c in coeffs):
            raise DomainError("P(alpha, w) vanishes identically")
        try:
            # multiple roots converge only linearly, so the step budget grows with precision
            roots, _err = mpmath.polyroots(coeffs, maxsteps=max(200, prec), extraprec=prec, error=True)
        except mpmath.libmp.NoConvergence:
            raise PrecisionError(f"root finder did not converge at {prec} bits", 2 * prec) from None
        tol = mpmath.mpf(2) ** (-prec // 4)
        clusters: list[list] = []
        for r in roots:
            for c in clusters:
                if abs(c[0] - r) < tol:
                    c.append(r)
                    break
            else:
                clusters.append([r])
        return [(sum(c) / len(c), len(c)) for c in clusters]


def _as_function(f):
    return f if callable(f) and not isinstance(f, BiRational) else BiRational.of(f)


def trace_numeric(model: CoverModel, f, alpha, prec: int | None = None):
    """``sum_k f(alpha, w_k)`` over the fiber (with multiplicity)."""
    prec = prec or model.precision
    f = _as_function(f)
    with mpmath.workprec(prec):
        total = mpmath.mpc(0)
        for w, mult in fiber(model, alpha, prec):
            try:
                v = f(alpha, w, prec) if isinstance(f, BiRational) else f(alpha, w)
            except (DomainError, ZeroDivisionError):
                raise DomainError(f"pole on the fiber at t={mpmath.nstr(alpha, 12)}, w={mpmath.nstr(w, 12)}") from None
            total += mult * v
        return total


def trace_exact(model: CoverModel, f):
    """Field trace to ``Q(t)``, as an element of :data:`~antider_kit.algebra.QT`."""
    f = BiRational.of(f)
    A = model.algebra
    return A.trace(A.from_rational(f.num, f.den))


def euler_derivation(f):
    """``t d/dt``; equal to ``z d/dz`` because ``z = t/s``."""
    return T * f.diff(T)


def inversion_pullback(f):
    """``t -> 1/t``."""
    return qt_reverse(f)


def qt_eval(f, t):
    num, den = qt_coeffs(f)
    t = mpmath.mpc(t)
    n = mpmath.polyval([mpmath.mpf(c.numerator) / c.denominator for c in reversed(num)], t) if num else 0
    dv = mpmath.polyval([mpmath.mpf(c.numerator) / c.denominator for c in reversed(den)], t)
    if dv == 0:
        raise DomainError(f"pole at t={mpmath.nstr(t, 12)}")
    return n / dv


# -- vanishing polynomial and trace expansions ---------------------------------------------


@dataclass(frozen=True)
class VanishingPolynomial:
    coeffs: tuple  # ascending integer coefficients of q(t)
    leading: int
    unit: bool  # leading coefficient is +-1
    fiber_clear: bool  # q(0) != 0

    @property
    def ok(self) -> bool:
        return self.unit and self.fiber_clear

    def as_qt(self):
        from .algebra import qt_from_coeffs
        return qt_from_coeffs(self.coeffs)


def _primitive_int(coeffs: list[Fraction]) -> list[int]:
    if not any(coeffs):
        raise DomainError("zero resultant: tau's denominator shares a component with P")
    lcm = 1
    for c in coeffs:
        lcm = lcm * c.denominator // math.gcd(lcm, c.denominator)
    ints = [int(c * lcm) for c in coeffs]
    g = 0
    for c in ints:
        g = math.gcd(g, c)
    return [c // g for c in ints]


def vanishing_polynomial(model: CoverModel, check_fiber: bool = True) -> VanishingPolynomial:
    """``q = Res_w(P, den(tau))`` made primitive over ``Z``.

    With ``check_fiber`` a zero of ``q`` at ``t = 0`` (a pole of ``tau`` over
    the central fiber) is a domain error.
    """
    den = model.tau.den
    if den.degree(1) <= 0 and den.degree(0) <= 0:
        coeffs = [1]
    else:
        t, w = sympy.symbols("t w")
        res = sympy.resultant(model.P.as_expr(t, w), den.as_expr(t, w), w)
        poly = sympy.Poly(sympy.expand(res), t)
        asc = [Fraction(int(sympy.fraction(c)[0]), int(sympy.fraction(c)[1]))
               for c in reversed(poly.all_coeffs())]
        coeffs = _primitive_int(asc)
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
    lead = coeffs[-1]
    clear = coeffs[0] != 0
    if check_fiber and not clear:
        raise DomainError(f"{model.name}: q(0) = 0, tau has a pole over t = 0")
    return VanishingPolynomial(tuple(coeffs), lead, abs(lead) == 1, clear)


@dataclass(frozen=True)
class TraceExpansion:
    """``Tr(tau^l e) = q^(-q_power) * sum_j coeffs[j - k1] t^j`` for ``k1 <= j <= k2``."""

    l: int
    q_power: int
    k1: int
    k2: int
    coeffs: tuple

    @property
    def integral(self) -> bool:
        return all(Fraction(c).denominator == 1 for c in self.coeffs)


def trace_expansion(model: CoverModel, e, l: int, derived: bool = False) -> TraceExpansion:
    """Trace of ``tau^l e`` (or its Euler derivative) over the power of ``q`` that clears it."""
    e = BiRational.of(e)
    A = model.algebra
    tau = A.from_rational(model.tau.num, model.tau.den)
    f = A.trace(A.mul(A.pow(tau, l), A.from_rational(e.num, e.den)))
    if derived:
        f = euler_derivation(f)
    q = vanishing_polynomial(model).as_qt()
    for power in range(0, 2 * l + 3):
        g = f * q ** power
        num, den = qt_coeffs(g)
        if len(den) == 1:
            num = [c / den[0] for c in num]
            nz = [j for j, c in enumerate(num) if c]
            if not nz:
                return TraceExpansion(l, power, 0, -1, ())
            return TraceExpansion(l, power, nz[0], nz[-1], tuple(num[nz[0]:nz[-1] + 1]))
    raise DomainError("trace has poles away from q = 0")


# -- attestation ----------------------------------------------------------------------------


@dataclass
class AttestationReport:
    model: str
    unramified: bool
    fiber_t0: list
    assigned_anchors: list
    anchors_distinct: bool
    a1_hat: float
    a1_t: float
    proximity_samples: list = field(repr=False)
    a2_hat: float = 0.0
    max_proximity: float = 0.0

    @property
    def ok(self) -> bool:
        return self.unramified and self.anchors_distinct

    def to_json(self) -> dict:
        return {"model": self.model, "ok": self.ok, "unramified": self.unramified,
                "fiber_t0": [[float(w.real), float(w.imag)] for w in self.fiber_t0],
                "assigned_anchors": self.assigned_anchors, "anchors_distinct": self.anchors_distinct,
                "a1_hat": self.a1_hat, "a1_t": self.a1_t, "a2_hat": self.a2_hat,
                "max_proximity": self.max_proximity,
                "proximity_samples": self.proximity_samples}


def attest_conditions(model: CoverModel, anchor_set: AnchorSet, radial: int = 6, angular: int = 8,
                      search_radius: float | None = None) -> AttestationReport:
    """Check the toy-model analogues of the cover conditions.

    * the fiber over ``t = 0`` is unramified;
    * every fiber point gets its own nearest anchor (``tau`` values);
    * ``a1``: smallest sampled ``|z|`` at which some sheet leaves the anchor
      disks of radius ``r1`` (searched along rays up to ``search_radius`` in t);
    * ``a2``: ``s * max |tau - anchor|`` over samples with ``|t| < 2/s``.
    """
    prec = model.precision
    s = float(model.scale)
    with mpmath.workprec(prec):
        roots = fiber(model, 0, prec)
        unram = all(m == 1 for _, m in roots)
        taus = [model.tau(0, w, prec) for w, _ in roots]
        assigned = [anchor_set.nearest(tv)[0] for tv in taus]
        distinct = len(set(assigned)) == len(assigned)
        anchors = [anchor_set.anchors[i] for i in assigned]

        samples = []
        worst = 0.0
        for a in range(1, radial + 1):
            rad = (2 / s) * a / (radial + 1)
            for b in range(angular):
                tt = rad * mpmath.expjpi(mpmath.mpf(2 * b) / angular)
                defect = 0.0
                for w, _ in fiber(model, tt, prec):
                    tv = model.tau(tt, w, prec)
                    defect = max(defect, float(min(abs(tv - an) for an in anchors)))
                worst = max(worst, defect)
                samples.append({"t": [float(tt.real), float(tt.imag)], "defect": defect})

        r1 = anchor_set.r1
        limit = search_radius if search_radius is not None else 64.0 * s
        a1_t = limit
        for b in range(angular):
            ray = mpmath.expjpi(mpmath.mpf(2 * b + 1) / angular)
            rad = limit * 2.0 ** -30
            while rad < a1_t:
                tt = rad * ray
                out = any(min(abs(model.tau(tt, w, prec) - an) for an in anchor_set.anchors) >= r1
                          for w, _ in fiber(model, tt, prec))
                if out:
                    a1_t = min(a1_t, rad)
                    break
                rad *= 2 ** 0.5
    return AttestationReport(model.name, unram, [w for w, _ in roots], assigned, distinct,
                             a1_t / s, a1_t, samples, worst * s, worst)


# -- model constructors and documents --------------------------------------------------------


def _in_z(g, s: Fraction) -> BiRational:
    """A family function written in ``z`` and ``w`` (strings) with ``z = t/s``."""
    if not isinstance(g, str):
        return BiRational.of(g)
    t, z = sympy.symbols("t z")
    expr = sympy.sympify(g, locals={"t": t, "z": z, "w": sympy.Symbol("w")})
    expr = expr.subs(z, t * sympy.Rational(s.denominator, s.numerator))
    return BiRational.of(str(sympy.expand(expr)))


def canonical_model(d: int = 3, g=None, name: str | None = None) -> CoverModel:
    """``w^d - t w - 1`` over ``Z`` with ``tau = w``.

    ``w`` is a unit (``w^-1 = w^(d-1) - t``) so the vanishing polynomial is 1.
    The family is the pair built from ``g`` (default ``t (1 + w)``).
    """
    P = W ** d - TW * W - 1
    g = _in_z(g if g is not None else "t*(1+w)", Fraction(1))
    fam = DifferentialFamily.paired(1, g)
    return CoverModel(P, BiRational.of(W), 1, fam, d, name or f"canonical-d{d}")


def scaled_model(s, d: int = 3, g=None, name: str | None = None) -> CoverModel:
    """``w^d - (t/s) w - 1`` with ``tau = w`` and the paired family of ``g``
    (a string in ``z = t/s`` and ``w``; default ``z (1 + w)``).

    In the coordinate ``z = t/s`` this is the canonical model; ``s`` plays the
    norm of the first section.
    """
    s = Fraction(s)
    inv = R2(QQ(s.denominator, s.numerator))
    P = W ** d - inv * TW * W - 1
    g = _in_z(g if g is not None else "z*(1+w)", s)
    fam = DifferentialFamily.paired(1, g)
    return CoverModel(P, BiRational.of(W), s, fam, d, name or f"scaled-d{d}-s{s}")


def power_form_model(d: int, R, family=None, name: str | None = None) -> CoverModel:
    """``w^d - R(t)`` with ``R(0) = 1`` and ``tau = w``."""
    Rp = _coerce_poly([list(R)]) if not isinstance(R, str) else _coerce_poly(R)
    P = W ** d - Rp
    return CoverModel(P, BiRational.of(W), 1, family, d, name or f"power-form-d{d}")


def _poly_or_rational(obj):
    if isinstance(obj, dict):
        return BiRational.ratio(obj["num"], obj.get("den", 1))
    return BiRational.of(obj)


def model_from_document(doc: dict) -> CoverModel:
    for key in ("P",):
        if key not in doc:
            raise DocumentError(f"missing field {key!r}", 1, 1)
    tau = BiRational.ratio(doc.get("tau_num", [[0], [1]]), doc.get("tau_den", 1))
    family = None
    if "family" in doc:
        family = DifferentialFamily([(_poly_or_rational(u), _poly_or_rational(e)) for u, e in doc["family"]],
                                    float(doc.get("bound", 1.0)))
    scale = doc.get("scale", 1)
    scale = parse_rational(scale) if isinstance(scale, str) else Fraction(scale)
    return CoverModel(_coerce_poly(doc["P"]), tau, scale, family, doc.get("n1"), doc.get("name", "model"),
                      int(doc.get("precision", 256)))


def load_model(path) -> CoverModel:
    with open(path, encoding="utf-8") as fh:
        return model_from_document(parse_document(fh.read()))


_CORPUS = {
    "sqrt-shift": "P = [[-1, -1], [0], [1]]\nfamily = [('1', 't'), ('-t', '1')]\n",
    "cubic-shift": "P = [[-1, -1], [0], [0], [1]]\n",
    "canonical-d2": "P = [[-1], [0, -1], [1]]\nfamily = [('1', 't*(2+w)'), ('-t*(2+w)', '1')]\n",
    "canonical-d3": "P = [[-1], [0, -1], [0], [1]]\nfamily = [('1', 't*(1+w)'), ('-t*(1+w)', '1')]\n",
    "canonical-d4": "P = [[-1], [0, -1], [0], [0], [1]]\nfamily = [('1', 't*(2+w)'), ('-t*(2+w)', '1')]\n",
    "canonical-d5": "P = [[-1], [0, -1], [0], [0], [0], [1]]\nfamily = [('1', 'w'), ('-w', '1')]\n",
    "quartic-mixed": "P = '(w**4 - 2*t*w**2 + 3*t**2*w - 2 - t)'\n",
    "quintic-dense": "P = 'w**5 + t*w**4 - 2*w**3 + (t**2 - 1)*w + 3 + t'\n",
    "rational-tau": "P = 'w**3 - t*w - 1'\ntau_num = 'w'\ntau_den = 'w + 2'\n",
    "quadratic-twist": "P = 'w**2 + t*w + t**2 - 5'\ntau_num = 'w + t'\n",
}


def corpus_models() -> dict[str, CoverModel]:
    out = {}
    for name, text in _CORPUS.items():
        doc = parse_document(text)
        doc["name"] = name
        out[name] = model_from_document(doc)
    return out
