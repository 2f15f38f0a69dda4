"""The function ``G_2``, its contour integral against ``omega``, exact
residues over ``Z``, the scale sweep, and the height-bound evaluator.

For a model with family ``(u_i, e_i)`` and kernel coordinate ``tau``::

    G_2 = sum_i sum_l b_{m,l} tau^(-l) u_i * psi^*(t d/dt Tr(tau^l e_i))

where ``psi^*`` is ``t -> 1/t``.  Tracing ``(omega/dt) G_2`` down to the
``t``-line gives ``sum_{i,l} b_{m,l} Tr(omega/dt tau^-l u_i) * psi^* E_{i,l}``;
its residue at ``t = 0`` is what the quadrature on ``|t| = r`` is compared to.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .algebra import QT, laurent_coefficients
from .cover import (
    BiRational,
    CoverModel,
    euler_derivation,
    fiber,
    inversion_pullback,
    qt_eval,
    scaled_model,
    trace_exact,
    vanishing_polynomial,
)
from .exactkernel import DomainError, binom, format_rational, split_coefficients

__all__ = [
    "ContourSpec",
    "ConvergenceError",
    "G2Data",
    "HeightInputs",
    "IntegralityError",
    "IntegralityReport",
    "Lemma24Report",
    "RefusalError",
    "beta_sum",
    "contour_integral",
    "exact_residue",
    "g2_eval",
    "height_bound",
    "integrality_check",
    "lemma24_experiment",
    "omega_g2_integrand",
    "residue_sum",
]


class ConvergenceError(ArithmeticError):
    """Quadrature did not settle within the node/precision ceiling."""


class RefusalError(DomainError):
    """The exact integrality path does not apply to this model."""


class IntegralityError(AssertionError):
    """An exact residue that should be an integer is not."""


def _b(m: int) -> list[Fraction]:
    if m == 0:
        return [Fraction(1)]
    return list(split_coefficients(m).values)


def _central(m: int) -> int:
    return binom(2 * m, m)


# -- G_2 -----------------------------------------------------------------------------


class G2Data:
    """Exact ingredients of ``G_2`` for one ``(model, m)``.

    ``E[i][l] = t d/dt Tr(tau^l e_i)`` and ``psiE[i][l]`` its pullback, both in
    ``Q(t)``; ``A[i][l] = Tr(omega/dt * tau^-l * u_i)``.
    """

    def __init__(self, model: CoverModel, m: int):
        if model.family is None:
            raise DomainError(f"{model.name}: no differential family")
        self.model, self.m = model, m
        self.b = _b(m)
        alg = model.algebra
        tau = alg.from_rational(model.tau.num, model.tau.den)
        tau_inv = alg.inv(tau)
        big_omega = BiRational(model.omega_dt.expr * model.P_w.expr)
        om = alg.from_rational(big_omega.num, big_omega.den)
        self.E, self.psiE, self.A = [], [], []
        for u, e in model.family.pairs:
            ee = alg.from_rational(e.num, e.den)
            uu = alg.mul(om, alg.from_rational(u.num, u.den))
            Ei, Pi, Ai = [], [], []
            for _ in range(m + 1):
                tr = euler_derivation(alg.trace(ee))
                Ei.append(tr)
                Pi.append(inversion_pullback(tr))
                Ai.append(alg.trace_over_pw(uu))
                ee = alg.mul(ee, tau)
                uu = alg.mul(uu, tau_inv)
            self.E.append(Ei)
            self.psiE.append(Pi)
            self.A.append(Ai)

    def traced_integrand(self):
        """``Tr((omega/dt) G_2)`` as an element of ``Q(t)``."""
        total = QT.zero
        for Ai, Pi in zip(self.A, self.psiE):
            for l, bl in enumerate(self.b):
                if Ai[l] and Pi[l]:
                    total += bl.numerator * Ai[l] * Pi[l] / bl.denominator
        return total

    def level_residues(self) -> list[Fraction]:
        """``r_l = Res_{t=0} sum_i A[i][l] psiE[i][l]`` for each level ``l``."""
        out = []
        for l in range(self.m + 1):
            f = QT.zero
            for Ai, Pi in zip(self.A, self.psiE):
                f += Ai[l] * Pi[l]
            v, c = laurent_coefficients(f, 0)
            out.append(c[-1 - v] if v <= -1 else Fraction(0))
        return out


_G2_CACHE: dict = {}


def _g2data(model: CoverModel, m: int) -> G2Data:
    key = (id(model), m)
    hit = _G2_CACHE.get(key)
    if hit is None or hit.model is not model:
        hit = G2Data(model, m)
        _G2_CACHE[key] = hit
    return hit


def g2_eval(model: CoverModel, m: int, point, route: str = "exact", prec: int | None = None):
    """``G_2`` at a curve point ``(t, w)``.

    ``route="exact"`` evaluates the exact pulled-back Euler traces;
    ``route="numeric"`` sums over the fiber above ``1/t`` instead.
    """
    prec = prec or model.precision
    t, w = point
    with mpmath.workprec(prec):
        t, w = mpmath.mpc(t), mpmath.mpc(w)
        tau_p = model.tau(t, w, prec)
        if tau_p == 0:
            raise DomainError("tau vanishes at the point")
        us = [u(t, w, prec) for u in model.family.u]
        if route == "exact":
            data = _g2data(model, m)
            total = mpmath.mpc(0)
            for ui, Pi in zip(us, data.psiE):
                acc = mpmath.mpc(0)
                for l in range(m, -1, -1):
                    acc = acc / tau_p + (data.b[l] and mpmath.mpf(data.b[l].numerator) / data.b[l].denominator
                                         * qt_eval(Pi[l], t))
                total += ui * acc
            return total
        if route == "numeric":
            return _g2_numeric(model, m, tau_p, us, 1 / t, prec)
        raise ValueError(f"unknown route {route!r}")


def _g2_numeric(model, m, tau_p, us, tp, prec):
    from .antideriv import kernel_euler_trace
    total = mpmath.mpc(0)
    for ui, e in zip(us, model.family.e):
        total += ui * kernel_euler_trace(model, e, m, tau_p, tp, prec)
    return total


# -- contour integration ---------------------------------------------------------------


@dataclass(frozen=True)
class ContourSpec:
    radius: float = 1.0
    nodes: int = 32
    precision: int = 256
    tolerance: float = 1e-10
    max_nodes: int = 4096

    def __post_init__(self):
        if self.nodes < 16 or self.nodes % 2:
            raise DomainError("nodes must be even and at least 16")
        if self.radius <= 0:
            raise DomainError("radius must be positive")


def _trapezoid(f, spec: ContourSpec, n: int, on_curve, model):
    total = mpmath.mpc(0)
    r = mpmath.mpf(spec.radius)
    for k in range(n):
        t = r * mpmath.expjpi(mpmath.mpf(2 * k) / n)
        try:
            if on_curve:
                val = 0
                for w, mult in fiber(model, t, spec.precision):
                    if mult != 1:
                        raise DomainError("contour passes through a branch point")
                    val += f(t, w)
            else:
                val = f(t)
        except (DomainError, ZeroDivisionError) as exc:
            raise DomainError(f"integrand singular on |t|={spec.radius} at node {k}: {exc}") from None
        total += val * t
    return total / n


def contour_integral(f, spec: ContourSpec, model: CoverModel | None = None):
    """``(1/2 pi i) * integral of f dt`` over ``|t| = radius`` by the trapezoid rule.

    With a model, ``f(t, w)`` is summed over every sheet.  ``N`` doubles from
    ``spec.nodes`` until two successive values differ by less than
    ``spec.tolerance``.
    """
    with mpmath.workprec(spec.precision):
        n = spec.nodes
        prev = _trapezoid(f, spec, n, model is not None, model)
        while n < spec.max_nodes:
            n *= 2
            cur = _trapezoid(f, spec, n, model is not None, model)
            if abs(cur - prev) < spec.tolerance:
                return cur
            prev = cur
    raise ConvergenceError(f"no convergence with {spec.max_nodes} nodes on |t|={spec.radius}")


def omega_g2_integrand(model: CoverModel, m: int, route: str = "exact"):
    """``(t, w) -> (omega/dt)(t, w) * G_2(t, w)``."""
    om = model.omega_dt
    prec = model.precision
    data = _g2data(model, m) if route == "exact" else None
    cache: dict = {}

    def f(t, w):
        if route != "exact":
            return om(t, w, prec) * g2_eval(model, m, (t, w), route, prec)
        key = (t.real, t.imag)
        if key not in cache:  # pulled-back traces depend on t only
            cache.clear()
            cache[key] = [[mpmath.mpf(bl.numerator) / bl.denominator * qt_eval(Pl, t) if bl else 0
                           for bl, Pl in zip(data.b, Pi)] for Pi in data.psiE]
        vals = cache[key]
        tau_p = model.tau(t, w, prec)
        total = mpmath.mpc(0)
        for u, row in zip(model.family.u, vals):
            acc = mpmath.mpc(0)
            for l in range(m, -1, -1):
                acc = acc / tau_p + row[l]
            total += u(t, w, prec) * acc
        return om(t, w, prec) * total

    return f


# -- exact residues ------------------------------------------------------------------------


def residue_sum(model: CoverModel, m: int) -> Fraction:
    """``sum_l b_{m,l} r_l``: the exact residue at ``t = 0`` of ``Tr((omega/dt) G_2)``."""
    data = _g2data(model, m)
    return sum((bl * r for bl, r in zip(data.b, data.level_residues())), Fraction(0))


def _integral_model(model: CoverModel) -> bool:
    for _, c in model.P.terms():
        if c.denominator != 1:
            return False
    for f in [model.tau] + ([g for pair in model.family.pairs for g in pair] if model.family else []):
        for p in (f.num, f.den):
            if any(c.denominator != 1 for _, c in p.terms()):
                return False
    return True


def exact_residue(model: CoverModel, m: int) -> int:
    """``C(2m, m) * residue_sum``; refuses models outside the integrality setting."""
    q = vanishing_polynomial(model, check_fiber=False)
    if not q.unit:
        raise RefusalError(f"{model.name}: q has leading coefficient {q.leading}, not a unit")
    if not q.fiber_clear:
        raise RefusalError(f"{model.name}: q vanishes at t = 0")
    if not _integral_model(model):
        raise RefusalError(f"{model.name}: model coefficients are not integers")
    data = _g2data(model, m)
    total = Fraction(0)
    for l, r in enumerate(data.level_residues()):
        total += binom(m, l) ** 2 * r if m else r
    if total.denominator != 1:
        raise IntegralityError(f"{model.name}, m={m}: residue {total} is not an integer")
    return total.numerator


@dataclass
class IntegralityReport:
    model_id: str
    m: int
    exact: int | None
    numeric: object
    distance: float
    refused: str | None = None

    @property
    def passed(self) -> bool:
        return self.exact is not None and self.distance < 1e-8

    def to_json(self) -> dict:
        return {"model_id": self.model_id, "m": self.m,
                "exact": None if self.exact is None else str(self.exact),
                "numeric": [float(self.numeric.real), float(self.numeric.imag)],
                "distance": self.distance, "pass": self.passed, "refused": self.refused}


def integrality_check(model: CoverModel, m: int, spec: ContourSpec = ContourSpec()) -> IntegralityReport:
    numeric = _central(m) * contour_integral(omega_g2_integrand(model, m), spec, model)
    try:
        exact = exact_residue(model, m)
    except RefusalError as exc:
        return IntegralityReport(model.name, m, None, numeric, math.inf, str(exc))
    return IntegralityReport(model.name, m, exact, numeric, float(abs(numeric - exact)))


# -- scale sweep ------------------------------------------------------------------------------


def beta_sum(model: CoverModel) -> Fraction:
    """``sum_j beta_j^2 / s^2`` with ``beta_j = (omega/dz)(x_j)`` over ``t = 0``:
    equal to ``Tr((omega/dt)^2)`` at ``t = 0``."""
    tr = trace_exact(model, model.omega_dt * model.omega_dt)
    v, c = laurent_coefficients(tr, 0)
    if v < 0:
        raise DomainError("omega/dt has a pole over t = 0")
    return c[-v] if v <= 0 else Fraction(0)


def _loglog_slope(x, y) -> float:
    return float(np.polyfit(np.log(np.asarray(x, float)), np.log(np.asarray(y, float)), 1)[0])


@dataclass
class Lemma24Report:
    config: dict
    rows: list  # dicts with s, m, value, target, err
    order_s: float
    rate_m: float
    rho2_hat: float
    a10_hat: float
    a11_hat: int
    beta: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"config": self.config, "rows": self.rows, "order_s": self.order_s, "rate_m": self.rate_m,
                "rho2_hat": self.rho2_hat, "a10_hat": self.a10_hat, "a11_hat": self.a11_hat,
                "beta": self.beta}

    def table_rows(self) -> list:
        return [(r["s"], r["m"], r["err"], r["bound"], r["pass"]) for r in self.rows]


def lemma24_experiment(scales=(100, 200, 400, 800), m_fixed: int = 24, m_list=(2, 4, 6, 8, 10, 12),
                       s_fixed=1000, d: int = 2, rho2_hat: float = 0.5, omega_norm: float = 1.0,
                       models=None, g: str = "z*w") -> Lemma24Report:
    """Exact sweep of ``err(s, m) = |contour - sum beta^2 / s^2|``.

    On the scaled models ``tau = w`` is a unit, so the traced integrand is a
    Laurent polynomial and the contour value equals :func:`residue_sum`
    exactly; every ``err`` is an exact rational.
    """
    make = models or (lambda s: scaled_model(s, d, g=g))
    cells = [(s, m_fixed) for s in scales] + [(s_fixed, m) for m in m_list]
    rows, seen, betas = [], set(), {}
    cache = {}
    for s, m in cells:
        if (s, m) in seen:
            continue
        seen.add((s, m))
        if s not in cache:
            cache[s] = make(s)
        model = cache[s]
        value = residue_sum(model, m)
        target = beta_sum(model)
        betas[str(s)] = format_rational(target * Fraction(s) ** 2)
        err = abs(value - target)
        rows.append({"s": str(s), "m": m, "value": format_rational(value), "target": format_rational(target),
                     "err": float(err)})
    by_s = [r for r in rows if r["m"] == m_fixed and Fraction(r["s"]) in {Fraction(x) for x in scales}]
    by_m = [r for r in rows if Fraction(r["s"]) == Fraction(s_fixed) and r["m"] in set(m_list)]
    order = -_loglog_slope([float(Fraction(r["s"])) for r in by_s], [r["err"] for r in by_s])
    ms = [r["m"] for r in by_m]
    rate = math.exp(float(np.polyfit(ms, np.log([r["err"] for r in by_m]), 1)[0]))
    w2 = omega_norm ** 2
    a10 = 0.0
    for r in rows:
        s, m = float(Fraction(r["s"])), r["m"]
        need = (r["err"] / w2 - rho2_hat ** m / s ** 2) * s ** 3 / m
        a10 = max(a10, need)
    for r in rows:
        s, m = float(Fraction(r["s"])), r["m"]
        bound = (a10 * m / s ** 3 + rho2_hat ** m / s ** 2) * w2
        r["bound"] = bound
        r["pass"] = bool(r["err"] <= bound * (1 + 1e-12))
        r["scale_condition"] = bool(s > a10 * m)
    a11 = min(m for _, m in cells) - 1
    config = {"scales": [str(s) for s in scales], "m_fixed": m_fixed, "m_list": list(m_list),
              "s_fixed": str(s_fixed), "d": d, "g": g if models is None else "custom", "omega_norm": omega_norm}
    return Lemma24Report(config, rows, order, rate, rho2_hat, a10, a11, betas)


# -- height bound -------------------------------------------------------------------------------


@dataclass(frozen=True)
class HeightInputs:
    degree: int
    log_norm_xi1: float
    beta_sums: tuple  # one complex value per embedding
    omega_norm: float
    a9: float
    m: int
    a7: float | None = None

    def __post_init__(self):
        if self.degree < 1 or self.m < 1 or self.omega_norm <= 0 or self.a9 <= 0:
            raise DomainError("malformed height inputs")


def height_bound(inputs: HeightInputs) -> dict:
    """Evaluate the height inequality and the arithmetic chain behind it.

    Conclusion: ``log ||xi_1|| < a7 + (1/2) log(2 sum_sigma |sum beta^2| / [F:Q])``.
    The chain: ``C(2m, m) < 4^m`` exactly, and the pivot
    ``2 sum|sum beta^2| / ([F:Q] ||xi_1||^2) > m! m! / (2m)!``.
    ``a7`` defaults to ``m log 2``, the value the chain itself yields.
    """
    m = inputs.m
    central = binom(2 * m, m)
    chain_ok = central < 4 ** m
    mags = [abs(complex(b)) for b in inputs.beta_sums]
    hyp = all(v > inputs.a9 * inputs.omega_norm ** 2 for v in mags)
    total = sum(mags)
    a7 = inputs.a7 if inputs.a7 is not None else m * math.log(2)
    report = {"hypothesis_ok": hyp, "central_binomial_lt_4m": chain_ok, "a7": a7, "m": m}
    if not hyp:
        report.update(bound_value=None, margin=None, pivot_ok=None, bound_holds=None)
        return report
    bound = a7 + 0.5 * math.log(2 * total / inputs.degree)
    # compared in logs: ||xi_1||^2 overflows floats long before the bound stops being meaningful
    log_lhs = math.log(2 * total / inputs.degree) - 2 * inputs.log_norm_xi1
    log_rhs = -math.log(central)
    report.update(bound_value=bound, margin=bound - inputs.log_norm_xi1, bound_holds=inputs.log_norm_xi1 < bound,
                  pivot_log_lhs=log_lhs, pivot_log_rhs=log_rhs, pivot_ok=log_lhs > log_rhs)
    return report
