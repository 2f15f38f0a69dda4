"""Localization kernel on the projective line anchored at roots of unity.

For a point ``x`` with affine coordinate ``rho = v1/v0(x)`` the kernel is the
degree-``m`` polynomial in ``w' = v1/v0(x')``::

    f_{4,x}(x') = sum_l b_{m,l} * (w' / rho)**l

It equals 1 at ``x' = x`` and is small when ``x'`` sits near a different
anchor.  The scans here measure how small, and how fast it returns to 1.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, field

import mpmath
import numpy as np

from .exactkernel import DomainError, binom, rotated_frame_coeffs, split_coefficients

__all__ = [
    "AnchorSet",
    "ConfigurationError",
    "KernelParams",
    "LinearForm",
    "ProjPoint",
    "ScanReport",
    "LipschitzReport",
    "distinguishing_section",
    "fs_norm",
    "kernel_coefficients",
    "kernel_diagnostics",
    "kernel_eval",
    "neardiag_lipschitz_check",
    "offdiag_decay_scan",
]


class ConfigurationError(ValueError):
    """Anchor/disk configuration that the scans cannot use."""


@dataclass(frozen=True)
class ProjPoint:
    """Point of P^1 by its affine coordinate ``w = v1/v0``; ``w=None`` is infinity."""

    w: object = None

    @classmethod
    def infinity(cls) -> "ProjPoint":
        return cls(None)

    @classmethod
    def at(cls, w) -> "ProjPoint":
        return cls(mpmath.mpc(w))

    @property
    def is_infinity(self) -> bool:
        return self.w is None

    def homogeneous(self) -> tuple:
        return (mpmath.mpc(0), mpmath.mpc(1)) if self.w is None else (mpmath.mpc(1), mpmath.mpc(self.w))


@dataclass
class AnchorSet:
    n1: int
    g: int = 2
    r1: float = 0.02
    precision: int = 256
    anchors: list = field(init=False, repr=False)

    def __post_init__(self):
        if self.n1 < 1:
            raise ConfigurationError("n1 must be positive")
        if not 0 < self.r1 < 1:
            raise ConfigurationError(f"r1={self.r1} outside (0, 1)")
        if self.n1 <= 9 * self.g ** 2:
            warnings.warn(f"n1={self.n1} does not exceed 9g^2={9 * self.g ** 2}", stacklevel=2)
        with mpmath.workprec(self.precision):
            self.anchors = [mpmath.expjpi(mpmath.mpf(2 * k) / self.n1) for k in range(self.n1)]

    def separation(self) -> float:
        """Distance between neighbouring anchors."""
        return 2 * math.sin(math.pi / self.n1) if self.n1 > 1 else math.inf

    def disks_disjoint(self) -> bool:
        return 2 * self.r1 < self.separation()

    def nearest(self, w) -> tuple[int, object]:
        dists = [abs(w - a) for a in self.anchors]
        i = min(range(self.n1), key=lambda k: dists[k])
        return i, dists[i]


@dataclass(frozen=True)
class KernelParams:
    m: int
    anchor_set: AnchorSet
    precision: int = 256

    def __post_init__(self):
        if self.m < 1:
            raise DomainError("kernel order m must be positive")
        if self.precision < 64:
            raise DomainError("precision must be at least 64 bits")


# -- distinguishing sections ------------------------------------------------


@dataclass(frozen=True)
class LinearForm:
    """``w = a*v0^* + b*v1^*``: its value at ``[v0:v1]`` is ``a*v0 + b*v1``."""

    a: object
    b: object

    def __call__(self, p: ProjPoint):
        v0, v1 = p.homogeneous()
        return self.a * v0 + self.b * v1


def fs_norm(form: LinearForm, p: ProjPoint):
    """Pointwise Fubini-Study norm ``|w(x)|_h``."""
    v0, v1 = p.homogeneous()
    return abs(form(p)) / mpmath.sqrt(abs(v0) ** 2 + abs(v1) ** 2)


def distinguishing_section(points, i: int, prec: int = 256) -> LinearForm:
    """Section of O(1) with norm exactly 1 at ``points[i]`` and below 1 elsewhere.

    The dual of the unit vector representing ``points[i]``; Cauchy-Schwarz
    gives norm < 1 at every non-proportional point.
    """
    pts = list(points)
    if len(pts) < 2:
        raise DomainError("need at least two points")
    with mpmath.workprec(prec):
        homs = [p.homogeneous() for p in pts]
        for a in range(len(pts)):
            for b in range(a + 1, len(pts)):
                (p0, p1), (q0, q1) = homs[a], homs[b]
                if abs(p0 * q1 - p1 * q0) <= mpmath.mpf(2) ** (-prec // 2):
                    raise DomainError(f"points {a} and {b} coincide")
        v0, v1 = homs[i]
        n = mpmath.sqrt(abs(v0) ** 2 + abs(v1) ** 2)
        return LinearForm(mpmath.conj(v0) / n, mpmath.conj(v1) / n)


# -- kernel -----------------------------------------------------------------

_COEFF_CACHE: dict[tuple[int, int], list] = {}


def kernel_coefficients(m: int, prec: int) -> list:
    key = (m, prec)
    if key not in _COEFF_CACHE:
        _COEFF_CACHE[key] = split_coefficients(m).as_mpf(prec)
    return _COEFF_CACHE[key]


def _horner(coeffs, y):
    acc = 0
    for c in reversed(coeffs):
        acc = acc * y + c
    return acc


def _kernel(m: int, prec: int, rho, w):
    return _horner(kernel_coefficients(m, prec), w / rho)


def _check_finite_nonzero(x: ProjPoint, what: str):
    if x.is_infinity:
        raise DomainError(f"{what} at infinity")
    if x.w == 0:
        raise DomainError(f"{what} at 0: kernel divides by v1/v0(x)")


def kernel_eval(params: KernelParams, x: ProjPoint, xp: ProjPoint):
    _check_finite_nonzero(x, "x")
    if xp.is_infinity:
        raise DomainError("x' at infinity")
    with mpmath.workprec(params.precision):
        return _kernel(params.m, params.precision, mpmath.mpc(x.w), mpmath.mpc(xp.w))


# -- off-diagonal decay -------------------------------------------------------


@dataclass
class ScanReport:
    config: dict
    per_m: list
    rho1_hat: float
    violations: list
    rate_consistency: list
    grid: list  # rows (m, i, j, value)

    def to_json(self) -> dict:
        return {
            "config": self.config,
            "per_m": self.per_m,
            "rho1_hat": self.rho1_hat,
            "rate_consistency": self.rate_consistency,
            "violations": self.violations,
        }

    def grid_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["m", "i", "j", "value"])
        for row in sorted(self.grid):
            w.writerow([row[0], row[1], row[2], repr(row[3])])
        return buf.getvalue()


def _disk_offsets(r1: float, count: int, rng: np.random.Generator) -> list[complex]:
    """Center plus ``count - 1`` seeded points strictly inside radius ``r1``."""
    out = [0j]
    for _ in range(count - 1):
        rad = r1 * math.sqrt(rng.random())
        ang = 2 * math.pi * rng.random()
        out.append(complex(rad * math.cos(ang), rad * math.sin(ang)))
    return out


def offdiag_decay_scan(params: KernelParams, m_list, samples_per_disk: int = 9,
                       seed: int = 0, consistency_eps: float = 0.05,
                       full_grid: bool = False) -> ScanReport:
    """Sup of ``|f_{4,x}(x')|`` over sampled pairs in distinct anchor disks.

    The same seeded offsets are used in every disk, rotated with the disk, so
    the value for anchors ``(i, j)`` depends only on ``j - i`` and each class
    is computed once.  Anchor centers are always among the samples.
    """
    A = params.anchor_set
    if A.n1 < 2:
        raise ConfigurationError("need at least two anchors")
    if not A.disks_disjoint():
        raise ConfigurationError(
            f"disks of radius {A.r1} around {A.n1} anchors overlap (separation {A.separation():.6g})")
    rng = np.random.default_rng(seed)
    offsets = _disk_offsets(A.r1, samples_per_disk, rng)
    prec = params.precision
    per_m, grid, violations = [], [], []
    sups = {}
    with mpmath.workprec(prec):
        # x = anchor_i * (1 + d_x), x' = anchor_j * (1 + d_x'); offsets rotate with the disk
        pts = [1 + mpmath.mpc(o) for o in offsets]
        for m in m_list:
            coeffs = kernel_coefficients(m, prec)
            by_shift = {}
            for k in range(1, A.n1):
                rot = A.anchors[k]
                best = mpmath.mpf(0)
                arg = (0, 0)
                for a, px in enumerate(pts):
                    for b, py in enumerate(pts):
                        v = abs(_horner(coeffs, rot * py / px))
                        if v > best:
                            best, arg = v, (a, b)
                        if v >= 1:
                            violations.append({"m": m, "shift": k, "x_offset": [offsets[a].real, offsets[a].imag],
                                               "xp_offset": [offsets[b].real, offsets[b].imag],
                                               "value": float(v)})
                by_shift[k] = (best, arg)
            sup = max(v for v, _ in by_shift.values())
            sups[m] = sup
            kmax = max(by_shift, key=lambda k: by_shift[k][0])
            per_m.append({"m": m, "sup": float(sup), "sup_pow_inv_m": float(sup ** (mpmath.mpf(1) / m)),
                          "argmax_shift": kmax})
            if full_grid:
                for i in range(A.n1):
                    for j in range(A.n1):
                        if i != j:
                            grid.append((m, i, j, float(by_shift[(j - i) % A.n1][0])))
            else:
                for k, (v, _) in sorted(by_shift.items()):
                    grid.append((m, 0, k, float(v)))
    rho1 = max(r["sup_pow_inv_m"] for r in per_m) if per_m else float("nan")
    consistency = []
    for m in m_list:
        if 2 * m in sups:
            ok = sups[2 * m] <= sups[m] ** 2 * (1 + consistency_eps)
            consistency.append({"m": m, "sup_2m": float(sups[2 * m]), "sup_m_sq": float(sups[m] ** 2),
                                "ok": bool(ok)})
    config = {"n1": A.n1, "g": A.g, "r1": A.r1, "precision": prec, "m_list": list(m_list),
              "samples_per_disk": samples_per_disk, "seed": seed}
    return ScanReport(config, per_m, rho1, violations, consistency, grid)


# -- near-diagonal Lipschitz bound ----------------------------------------------


@dataclass
class LipschitzReport:
    config: dict
    trials: int
    eligible: int
    max_ratio: float
    violations: list

    @property
    def vacuous(self) -> bool:
        return self.eligible == 0

    def to_json(self) -> dict:
        return {"config": self.config, "trials": self.trials, "eligible": self.eligible,
                "vacuous": self.vacuous, "max_ratio": self.max_ratio, "violations": self.violations}


def neardiag_lipschitz_check(params: KernelParams, trials: int, rng_seed: int = 0) -> LipschitzReport:
    """Check ``|f_{4,x}(x') - 1| <= 2m |w(x') - w(x)|`` on same-disk pairs with
    ``|w(x') - w(x)| < 1/(3m)``.

    ``max_ratio`` is the largest observed ``|f - 1| / (m |dw|)``; the bound
    asks for at most 2.
    """
    A, m, prec = params.anchor_set, params.m, params.precision
    rng = np.random.default_rng(rng_seed)
    window = min(1 / (3 * m), 2 * A.r1)
    violations = []
    eligible = 0
    worst = 0.0
    with mpmath.workprec(prec):
        coeffs = kernel_coefficients(m, prec)
        for _ in range(trials):
            i = int(rng.integers(A.n1))
            rx = A.r1 * math.sqrt(rng.random())
            ax = 2 * math.pi * rng.random()
            dx = complex(rx * math.cos(ax), rx * math.sin(ax))
            rd = window * math.sqrt(rng.random())
            ad = 2 * math.pi * rng.random()
            delta = complex(rd * math.cos(ad), rd * math.sin(ad))
            if abs(dx + delta) >= A.r1 or abs(delta) >= 1 / (3 * m):
                continue
            eligible += 1
            w = A.anchors[i] + mpmath.mpc(dx)
            wp = w + mpmath.mpc(delta)
            dev = abs(_horner(coeffs, wp / w) - 1)
            bound = 2 * m * abs(wp - w)
            if bound:
                worst = max(worst, float(dev / (m * abs(wp - w))))
            if dev > bound:
                violations.append({"anchor": i, "x": [float(w.real), float(w.imag)],
                                   "xp": [float(wp.real), float(wp.imag)],
                                   "deviation": float(dev), "bound": float(bound)})
    config = {"n1": A.n1, "r1": A.r1, "m": m, "precision": prec, "seed": rng_seed}
    return LipschitzReport(config, trials, eligible, worst, violations)


# -- rotated-frame diagnostics -----------------------------------------------------


def kernel_diagnostics(params: KernelParams, x: ProjPoint, xp: ProjPoint) -> dict:
    """Rotated-frame view of ``rho^m * f_{4,x}(x')``.

    With ``X, Y`` the unitary frame adapted to ``x`` (``Y(x) = 0``), the
    expansion ``v0^m v1^m = sum_i c_i X^(2m-i) Y^i`` is pushed through the split
    map and evaluated at ``x`` in the first factor.  Terms with ``i > m`` die;
    the rest are summed separately for ``i <= floor(m/2)`` (head) and above
    (tail).  ``lambda1 = |Y/X|`` at ``x'``.
    """
    _check_finite_nonzero(x, "x")
    if xp.is_infinity:
        raise DomainError("x' at infinity")
    m, prec = params.m, params.precision
    with mpmath.workprec(prec):
        rho = mpmath.mpc(x.w)
        wp = mpmath.mpc(xp.w)
        frame = rotated_frame_coeffs(m, rho, prec)
        nrm = mpmath.sqrt(1 + abs(rho) ** 2)
        X = (mpmath.conj(rho) * wp + 1) / nrm
        Y = (wp - rho) / nrm
        lam = mpmath.inf if X == 0 else abs(Y / X)
        head = tail = mpmath.mpc(0)
        for i in range(m + 1):
            f3 = mpmath.mpf(binom(m, i)) / binom(2 * m, i) * nrm ** m * X ** (m - i) * Y ** i
            term = frame.coeffs[i] * f3
            if i <= m // 2:
                head += term
            else:
                tail += term
        direct = rho ** m * _kernel(m, prec, rho, wp)
    return {
        "lambda1": lam,
        "regime": "lambda1<=2" if lam <= 2 else "lambda1>=2",
        "head_sum": head,
        "tail_sum": tail,
        "direct": direct,
        "precision": prec,
    }
