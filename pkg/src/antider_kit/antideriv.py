"""Local antiderivative approximator ``G_x`` and its adapted-basis machinery.

On a cover in the coordinate ``z`` (kernel coordinate ``tau``), for a point
``x`` with ``tau_x = tau(x)``::

    G_x(z') = sum_j u_j(x) * z d/dz [ sum_l b_{m,l} tau_x^(-l) Tr(tau^l e_j) ](z')

The kernel keeps the sheet through ``x`` and suppresses the others, so
``G_x(z') ~ (omega/dz)(x) * z'``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import mpmath
import numpy as np

from .arithcheck import _g2data
from .cover import BiRational, CoverModel, CoverPoint, DifferentialFamily, fiber, qt_eval
from .exactkernel import DomainError
from .plocal import KernelParams, kernel_coefficients

__all__ = [
    "AdaptedBasis",
    "ChartFunction",
    "DegenerateFamilyError",
    "FamilySpec",
    "ResidualReport",
    "antiderivative_residual",
    "g_x",
    "gram_and_adapted_basis",
    "kernel_euler_trace",
    "leakage_order",
    "make_null_family",
    "omega_dz_at",
    "polar_gauss_legendre",
    "sheet_function",
    "working_grid",
]


class DegenerateFamilyError(DomainError):
    pass


@dataclass
class ChartFunction:
    """Analytic function of the chart coordinate ``z`` with derivative access."""

    f: object
    df: object = None
    name: str = ""

    def __call__(self, z):
        return self.f(z)

    def derivative(self, z):
        if self.df is not None:
            return self.df(z)
        return mpmath.diff(self.f, z)

    def derivative_defect(self, z, h=None) -> float:
        """Relative gap between ``df`` and a central difference at ``z``."""
        h = h or mpmath.mpf(2) ** (-mpmath.mp.prec // 3)
        fd = (self.f(z + h) - self.f(z - h)) / (2 * h)
        d = self.derivative(z)
        return float(abs(fd - d) / max(abs(d), mpmath.mpf(1)))


# -- kernel-weighted Euler traces -------------------------------------------------------


def _kernel_pair(m: int, prec: int, y):
    """``f_m(y)`` and ``y f_m'(y)`` for the split-coefficient polynomial."""
    c = kernel_coefficients(m, prec)
    val = der = mpmath.mpc(0)
    for l in range(m, -1, -1):
        val = val * y + c[l]
        der = der * y + l * c[l]
    return val, der


def kernel_euler_trace(model: CoverModel, e: BiRational, m: int, tau_x, t0, prec: int):
    """``t d/dt sum_l b_{m,l} tau_x^(-l) Tr(tau^l e)`` at the base point ``t0``.

    Per sheet ``k`` with ``y = tau_k / tau_x`` the summand is
    ``f_m(y) e' + y f_m'(y) (tau'/tau) e`` (primes: ``d/dt`` along the sheet).
    """
    with mpmath.workprec(prec):
        t0 = mpmath.mpc(t0)
        total = mpmath.mpc(0)
        for w, mult in fiber(model, t0, prec):
            if mult != 1:
                raise DomainError(f"ramified fiber at t={mpmath.nstr(t0, 12)}")
            tau_k = model.tau(t0, w, prec)
            y = tau_k / tau_x
            fm, yfm = _kernel_pair(m, prec, y)
            ek = e(t0, w, prec)
            dek = model.curve_derivative(e, t0, w)
            dtau = model.curve_derivative(model.tau, t0, w)
            total += fm * dek + yfm * (dtau / tau_k) * ek
        return t0 * total


def omega_dz_at(model: CoverModel, x: CoverPoint, prec: int | None = None):
    prec = prec or model.precision
    with mpmath.workprec(prec):
        return model.omega_dz()(x.t, x.w, prec)


def g_x(model: CoverModel, params: KernelParams, x: CoverPoint, route: str = "numeric") -> ChartFunction:
    """``G_x`` as a function of the base coordinate (``t`` with scale 1).

    ``route="exact"`` uses the exact Euler traces ``E_{j,l}`` instead of
    fiber sums.
    """
    if model.family is None:
        raise DomainError("model has no family")
    m, prec = params.m, params.precision
    with mpmath.workprec(prec):
        tau_x = model.tau(x.t, x.w, prec)
        if tau_x == 0:
            raise DomainError("kernel coordinate vanishes at x")
        ux = [u(x.t, x.w, prec) for u in model.family.u]
    if route == "numeric":
        def f(z):
            with mpmath.workprec(prec):
                return sum((uj * kernel_euler_trace(model, e, m, tau_x, z, prec)
                            for uj, e in zip(ux, model.family.e)), mpmath.mpc(0))
    elif route == "exact":
        data = _g2data(model, m)
        with mpmath.workprec(prec):
            weights = [[ux[j] * mpmath.mpf(b.numerator) / b.denominator * tau_x ** (-l)
                        for l, b in enumerate(data.b)] for j in range(len(ux))]

        def f(z):
            with mpmath.workprec(prec):
                return sum((wt * qt_eval(E, z) for Ej, wj in zip(data.E, weights) for E, wt in zip(Ej, wj) if wt),
                           mpmath.mpc(0))
    else:
        raise ValueError(f"unknown route {route!r}")
    return ChartFunction(f, None, f"G_x[{route}]")


# -- residual measurement --------------------------------------------------------------------


@dataclass
class ResidualReport:
    config: dict
    grid: list
    residuals: list
    normalized: list
    a5_hat: float
    rho2_hat: float
    beta: complex
    slope_defect: float
    slope_radius: float

    def to_json(self) -> dict:
        return {"config": self.config,
                "grid": [[float(z.real), float(z.imag)] for z in self.grid],
                "residuals": self.residuals, "normalized": self.normalized,
                "a5_hat": self.a5_hat, "rho2_hat": self.rho2_hat,
                "beta": [self.beta.real, self.beta.imag],
                "slope_defect": self.slope_defect, "slope_radius": self.slope_radius}

    def csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["abs_z", "m", "residual"])
        for z, r in sorted(zip((abs(complex(z)) for z in self.grid), self.residuals)):
            w.writerow([repr(z), self.config["m"], repr(r)])
        return buf.getvalue()


def antiderivative_residual(model: CoverModel, params: KernelParams, x: CoverPoint, grid,
                            rho2_hat: float, slope_radius: float = 1e-4, route: str = "numeric") -> ResidualReport:
    """Measure ``|G_x(z') - (omega/dz)(x) z'|`` on ``grid``.

    Normalized residual: residual / ((m |z'|^2 + n1 rho2^m |z'|) |omega/dz(x)|),
    with ``n1`` the anchor count; ``a5_hat`` is its maximum.  The slope
    defect is ``|G_x(z')/z' - omega/dz(x)| / |omega/dz(x)|`` at
    ``|z'| = slope_radius`` in the direction of ``x``.
    """
    m, prec = params.m, params.precision
    n1 = params.anchor_set.n1
    grid = [mpmath.mpc(z) for z in grid]
    with mpmath.workprec(prec):
        zx = mpmath.mpc(x.t)
        for z in grid:
            if abs(z - zx) >= mpmath.mpf(1) / (3 * m):
                raise DomainError(f"grid point {complex(z)} outside the 1/(3m) window around x")
        G = g_x(model, params, x, route)
        beta = omega_dz_at(model, x, prec)
        if beta == 0:
            raise DomainError("omega/dz vanishes at x")
        res, norm = [], []
        for z in grid:
            r = abs(G(z) - beta * z)
            bound = (m * abs(z) ** 2 + n1 * mpmath.mpf(rho2_hat) ** m * abs(z)) * abs(beta)
            res.append(float(r))
            norm.append(float(r / bound) if bound else (0.0 if r == 0 else math.inf))
        direction = zx / abs(zx) if zx != 0 else mpmath.mpc(1)
        zs = slope_radius * direction
        slope = G(zs) / zs
        defect = float(abs(slope - beta) / abs(beta))
    config = {"model": model.name, "m": m, "n1": n1, "precision": prec, "route": route,
              "x": [float(zx.real), float(zx.imag), float(mpmath.re(x.w)), float(mpmath.im(x.w))]}
    return ResidualReport(config, grid, res, norm, max(norm) if norm else 0.0, rho2_hat, complex(beta),
                          defect, slope_radius)


def leakage_order(rho2_hat: float, n1: int, tol: float = 1e-3, floor: int = 32) -> int:
    """Smallest ``m >= floor`` with ``n1 * rho2^m <= tol``: the cross-sheet
    leakage in ``G_x`` is then negligible next to the slope."""
    if not 0 < rho2_hat < 1:
        raise DomainError(f"rho2 estimate {rho2_hat} not in (0, 1)")
    return max(floor, math.ceil(math.log(tol / n1) / math.log(rho2_hat)))


def working_grid(zx, m: int, levels: int = 8, angles: int = 8) -> list:
    """Grid points ``z'`` with ``|z'| >= |z(x)|`` inside the ``1/(3m)`` window.

    Radially outward from ``x`` along its ray (``x * 2^k``) plus a ring at
    ``2|x|``.  Points with ``|z'|`` far below ``|z(x)|`` are left out: there
    the residual is dominated by ``m |z'| |z' - z(x)|``, linear in ``z'``.
    """
    zx = mpmath.mpc(zx)
    window = mpmath.mpf(1) / (3 * m)
    pts = [zx * 2 ** k for k in range(levels) if abs(zx * 2 ** k - zx) < window]
    for j in range(1, angles):
        z = 2 * zx * mpmath.expjpi(mpmath.mpf(2 * j) / angles)
        if 0 < abs(z - zx) < window:
            pts.append(z)
    return pts


# -- null families ------------------------------------------------------------------------------


@dataclass(frozen=True)
class FamilySpec:
    mode: str = "paired"  # paired | random
    degree: int = 2
    count: int = 2
    rng_seed: int = 0
    pairs: tuple = (("1", "t"),)  # (f, g) blocks for paired mode


def _random_poly(rng, degree: int, use_w: bool):
    terms = []
    for i in range(degree + 1):
        for j in range((degree - i + 1) if use_w else 1):
            c = int(rng.integers(-3, 4))
            if c:
                terms.append(f"({c})*t**{i}*w**{j}")
    return BiRational.of(" + ".join(terms) if terms else "1")


def make_null_family(spec: FamilySpec, model: CoverModel | None = None) -> DifferentialFamily:
    """Family with ``sum u_j e_j = 0`` identically.

    ``paired``: one ``((f, -g), (g, f))`` block per ``(f, g)``, so
    ``omega = sum (f dg - g df)``.  ``random``: random integer ``e_j`` and
    ``u`` from antisymmetric combinations ``c_ab (e_b eps_a - e_a eps_b)``.
    Raises when ``omega`` vanishes identically.
    """
    if spec.count < 2:
        raise DomainError("count must be at least 2")
    if spec.mode == "paired":
        pairs = []
        for f, g in spec.pairs:
            f, g = BiRational.of(f), BiRational.of(g)
            pairs += [(f, g), (-g, f)]
    elif spec.mode == "random":
        rng = np.random.default_rng(spec.rng_seed)
        es = [_random_poly(rng, spec.degree, model is not None) for _ in range(spec.count)]
        us = [BiRational.of(0) for _ in es]
        for a in range(spec.count):
            for b in range(a + 1, spec.count):
                c = int(rng.integers(1, 4)) * (1 if rng.random() < 0.5 else -1)
                us[a] = us[a] + es[b] * c
                us[b] = us[b] - es[a] * c
        pairs = list(zip(us, es))
    else:
        raise ValueError(f"unknown mode {spec.mode!r}")
    fam = DifferentialFamily(pairs)
    if not fam.null_sum().is_zero():
        raise AssertionError("null identity failed")
    om = _omega_expr(fam, model)
    if om.is_zero() or (model is not None and not any(model.algebra.from_rational(om.num, om.den))):
        raise DegenerateFamilyError("omega vanishes identically")
    return fam


def _omega_expr(fam: DifferentialFamily, model: CoverModel | None) -> BiRational:
    if model is None:
        total = BiRational.of(0)
        for u, e in fam.pairs:
            total = total + u * e.diff_t()
        return total
    return CoverModel(model.P, model.tau, model.scale, fam, model.n1, model.name, model.precision,
                      validate=False).omega_dt


def measure_bound(fam: DifferentialFamily, model: CoverModel | None, x: CoverPoint, radius: float,
                  samples: int = 16) -> float:
    """``max_j max(|u_j|, |e_j|, |de_j/dz|) / |omega/dz|`` on a circle around ``x``."""
    om = _omega_expr(fam, model)
    worst = 0.0
    for k in range(samples):
        z = mpmath.mpc(x.t) + radius * mpmath.expjpi(mpmath.mpf(2 * k) / samples)
        w = _track(model, x, z) if model is not None else mpmath.mpc(0)
        o = abs(om(z, w))
        vals = []
        for u, e in fam.pairs:
            de = model.curve_derivative(e, z, w) if model is not None else e.diff_t()(z, w)
            vals += [abs(u(z, w)), abs(e(z, w)), abs(de)]
        worst = max(worst, float(max(vals) / o))
    return worst


# -- Gram matrix and adapted basis ---------------------------------------------------------------


def polar_gauss_legendre(radius: float, nodes: int, center: complex = 0j):
    """Nodes and weights for area integrals over ``|z - center| <= radius``."""
    x, wts = np.polynomial.legendre.leggauss(nodes)
    r = (x + 1) * radius / 2
    th = (x + 1) * math.pi
    wr = wts * radius / 2
    wt = wts * math.pi
    R, TH = np.meshgrid(r, th, indexing="ij")
    pts = center + R * np.exp(1j * TH)
    weights = np.outer(wr * r, wt)
    return pts.ravel(), weights.ravel()


def _track(model: CoverModel, x: CoverPoint, z, iters: int = 60):
    """The root of ``P(z, .)`` on the sheet through ``x``, by Newton from ``x.w``."""
    w = mpmath.mpc(x.w)
    prec = mpmath.mp.prec
    tol = mpmath.mpf(2) ** (-prec + 8)
    P = BiRational.of(model.P)
    for _ in range(iters):
        step = P(z, w, prec) / model.P_w(z, w, prec)
        w -= step
        if abs(step) <= tol * max(1, abs(w)):
            return w
    raise DomainError(f"sheet tracking failed at z={complex(z)}")


def sheet_function(f: BiRational, model: CoverModel | None, x: CoverPoint) -> ChartFunction:
    """``f`` restricted to the sheet through ``x`` (or, without a model, ``f(z, 0)``)."""
    if model is None:
        return ChartFunction(lambda z: f(z, 0, mpmath.mp.prec), lambda z: f.diff_t()(z, 0, mpmath.mp.prec), str(f))

    def val(z):
        return f(z, _track(model, x, z), mpmath.mp.prec)

    def der(z):
        w = _track(model, x, z)
        return model.curve_derivative(f, z, w)

    return ChartFunction(val, der, str(f))


@dataclass
class AdaptedBasis:
    gram: np.ndarray
    coeffs: np.ndarray  # row k: e_{x,k} = sum_i coeffs[k, i] e'_i
    dual: np.ndarray  # u_{x,k}(x)
    ev: np.ndarray
    der: np.ndarray
    omega_dz: complex
    checks: dict = field(default_factory=dict)

    @property
    def n3(self) -> int:
        return len(self.dual) - 1


def gram_and_adapted_basis(family: DifferentialFamily, x: CoverPoint, radius: float, nodes: int = 64,
                           model: CoverModel | None = None, center: complex | None = None,
                           tol: float = 1e-10, prec: int = 64) -> AdaptedBasis:
    """Gram matrix of ``h'`` over the disk and the adapted basis at ``x``.

    ``gram[i, j] = integral of e'_i conj(e'_j)`` by polar Gauss-Legendre.
    Row 0 of ``coeffs`` spans the ``h'``-orthogonal complement of the
    functions vanishing at ``x``; row 1 vanishes at ``x`` with unit
    derivative and is orthogonal to the rows below it, which vanish to order
    two and are ``h'``-orthonormal.
    """
    es = family.e
    n = len(es)
    if n < 2:
        raise DegenerateFamilyError("need at least two basis functions")
    if n > 64:
        raise DomainError("family dimension capped at 64")
    center = complex(x.t) if center is None else center
    if abs(complex(x.t) - center) >= radius:
        raise DomainError("x must lie inside the quadrature disk")
    with mpmath.workprec(prec):
        charts = [sheet_function(e, model, x) for e in es]
        pts, wts = polar_gauss_legendre(radius, nodes, center)
        vals = np.array([[complex(c(mpmath.mpc(p))) for p in pts] for c in charts])
        G = (vals * wts) @ vals.conj().T
        zx = mpmath.mpc(x.t)
        ev = np.array([complex(c(zx)) for c in charts])
        der = np.array([complex(c.derivative(zx)) for c in charts])
        ux = np.array([complex(u(x.t, x.w if model is not None else 0, prec)) for u in family.u])
    eig = np.linalg.eigvalsh((G + G.conj().T) / 2)
    if eig[0] <= tol * eig[-1]:
        raise DegenerateFamilyError(f"gram not positive definite (eigenvalues {eig[0]:.3g}..{eig[-1]:.3g})")

    def ip(a, b):
        return a @ G @ b.conj()

    c0 = np.linalg.solve(G.T, ev.conj())
    c0 = c0 / math.sqrt(ip(c0, c0).real)
    _, s, vh = np.linalg.svd(np.vstack([ev, der]))
    W2 = [v.conj() for v in vh[2:]]
    if s[-1] <= tol * s[0]:
        raise DegenerateFamilyError("evaluation and derivative functionals are dependent")
    ortho = []
    for v in W2:
        for _ in range(2):  # re-orthogonalize
            for q in ortho:
                v = v - ip(v, q) * q
        ortho.append(v / math.sqrt(ip(v, v).real))
    _, _, vh1 = np.linalg.svd(ev[None, :])
    ker_ev = [v.conj() for v in vh1[1:]]
    k = max(ker_ev, key=lambda v: abs(der @ v))
    for _ in range(2):
        for q in ortho:
            k = k - ip(k, q) * q
    c1 = k / (der @ k)
    A = np.vstack([c0, c1] + ortho)
    dual = ux @ np.linalg.inv(A)
    omega = complex(ux @ der)
    scale = max(1.0, float(np.abs(A).max()))
    checks = {
        "e1_at_x": abs(ev @ c1),
        "e1_slope_minus_1": abs(der @ c1 - 1),
        "higher_order_at_x": max([abs(ev @ v) + abs(der @ v) for v in ortho], default=0.0),
        "e0_orthogonality": max(abs(ip(c0, v)) for v in [c1] + ortho),
        "null_identity_at_x": abs(dual @ (A @ ev)),
        "u0_at_x": abs(dual[0]),
        "u1_minus_omega": abs(dual[1] - omega),
        "hermitian": float(np.abs(G - G.conj().T).max()),
        "min_eigenvalue": float(eig[0]),
        "coeff_scale": scale,
    }
    return AdaptedBasis(G, A, dual, ev, der, omega, checks)
