import math

import mpmath
import numpy as np
import pytest

from antider_kit.antideriv import (
    ChartFunction,
    DegenerateFamilyError,
    FamilySpec,
    _omega_expr,
    antiderivative_residual,
    g_x,
    gram_and_adapted_basis,
    leakage_order,
    make_null_family,
    measure_bound,
    omega_dz_at,
    polar_gauss_legendre,
    sheet_function,
    working_grid,
)
from antider_kit.cover import BiRational, CoverPoint, DifferentialFamily, canonical_model, fiber
from antider_kit.exactkernel import DomainError
from antider_kit.plocal import AnchorSet, KernelParams

from oracles import polar_disk_integral

pytestmark = pytest.mark.usefixtures("hiprec")

RHO2 = 0.754  # cross-disk rate for three anchors at r1 = 0.01


@pytest.fixture(scope="module")
def setup():
    with mpmath.workprec(256):
        model = canonical_model(3)
        zx = mpmath.mpf("1e-4") * mpmath.expjpi(0.3)
        x = CoverPoint(zx, fiber(model, zx)[0][0])
        return model, x, AnchorSet(3, 2, 0.01)


def test_chart_function_derivative_consistency():
    f = ChartFunction(lambda z: mpmath.exp(2 * z), lambda z: 2 * mpmath.exp(2 * z))
    assert f.derivative_defect(mpmath.mpc(0.3, 0.1)) < 1e-40
    bare = ChartFunction(lambda z: z ** 3)
    assert abs(bare.derivative(mpmath.mpf(2)) - 12) < 1e-30


def test_null_family_paired_examples():
    fam = make_null_family(FamilySpec("paired", pairs=(("1", "t"),)))
    assert [str(e) for e in fam.e] == ["t", "1"]
    assert _omega_expr(fam, None).expr == 1
    fam2 = make_null_family(FamilySpec("paired", pairs=(("t", "t**2"),)))
    assert _omega_expr(fam2, None).expr == BiRational.of("t**2").expr


def test_null_family_random():
    fam = make_null_family(FamilySpec("random", degree=3, count=4, rng_seed=7))
    assert fam.null_sum().is_zero()
    assert not _omega_expr(fam, None).is_zero()
    again = make_null_family(FamilySpec("random", degree=3, count=4, rng_seed=7))
    assert [str(e) for e in again.e] == [str(e) for e in fam.e]


def test_null_family_random_on_curve(setup):
    model = setup[0]
    fam = make_null_family(FamilySpec("random", degree=2, count=3, rng_seed=2), model)
    assert fam.null_sum().is_zero()


def test_null_family_errors():
    with pytest.raises(DegenerateFamilyError):
        make_null_family(FamilySpec("paired", pairs=(("t", "t"),)))
    with pytest.raises(DomainError):
        make_null_family(FamilySpec("paired", count=1))


def test_measure_bound_positive(setup):
    model, x, _ = setup
    assert 0 < measure_bound(model.family, model, x, 0.01) < math.inf


def test_polar_quadrature_matches_adaptive_oracle():
    pts, wts = polar_gauss_legendre(0.7, 32, 0.1 + 0.2j)
    f = lambda z: np.exp(z) * np.conj(z) + 1
    ours = complex(np.sum(wts * f(pts)))
    oracle = polar_disk_integral(lambda z: mpmath.exp(z + 0.1 + 0.2j) * mpmath.conj(z + 0.1 + 0.2j) + 1, 0.7)
    assert ours == pytest.approx(oracle, rel=1e-12)


def test_gram_unit_disk_example():
    fam = DifferentialFamily.paired(1, "t")  # e = (t, 1)
    ab = gram_and_adapted_basis(fam, CoverPoint(0, 0), 1.0, nodes=32)
    assert np.allclose(ab.gram, np.diag([math.pi / 2, math.pi]), atol=1e-12)
    # e_{x,0} is the constant direction, e_{x,1} = z
    assert abs(ab.coeffs[0][0]) < 1e-12
    assert np.allclose(ab.coeffs[1], [1, 0], atol=1e-12)
    assert abs(ab.dual[1] - 1) < 1e-12 and abs(ab.dual[0]) < 1e-12


def test_adapted_basis_invariants(setup):
    model, x, _ = setup
    fam = make_null_family(FamilySpec("paired", pairs=(("1", "t"), ("w", "t**2"))), model)
    ab = gram_and_adapted_basis(fam, x, 1.0, nodes=24, model=model, prec=128)
    c = ab.checks
    assert c["hermitian"] < 1e-12 and c["min_eigenvalue"] > 0
    for key in ("e1_at_x", "e1_slope_minus_1", "higher_order_at_x", "e0_orthogonality", "null_identity_at_x",
                "u0_at_x"):
        assert c[key] < 1e-8, key
    # independent evaluation of omega = sum u de for this family (scale 1, so dz = dt)
    beta = complex(_omega_expr(fam, model)(x.t, x.w))
    assert abs(ab.dual[1] - beta) < 1e-8 * max(1, abs(beta))
    assert ab.n3 == 3


def test_gram_rejects_dependent_family():
    fam = DifferentialFamily([("1", "t"), ("-1", "t")])
    with pytest.raises(DegenerateFamilyError):
        gram_and_adapted_basis(fam, CoverPoint(0, 0), 1.0, nodes=16)


def test_sheet_function_derivative(setup):
    model, x, _ = setup
    ch = sheet_function(BiRational.of("w**2 + t*w"), model, x)
    assert ch.derivative_defect(mpmath.mpc(x.t)) < 1e-30


def test_g_x_routes_agree(setup):
    model, x, A = setup
    p = KernelParams(8, A)
    num, ex = g_x(model, p, x, "numeric"), g_x(model, p, x, "exact")
    for z in (x.t, x.t / 2, x.t * 1.5j):
        assert abs(num(z) - ex(z)) < 1e-60


def test_g_x_vanishes_at_origin_and_has_slope_omega(setup):
    model, x, A = setup
    G = g_x(model, KernelParams(32, A), x)
    assert abs(G(mpmath.mpc(0))) < 1e-70
    beta = omega_dz_at(model, x)
    z = mpmath.mpf("1e-4") * x.t / abs(x.t)
    assert abs(G(z) / z - beta) < 1e-3 * abs(beta)


def test_residual_report_and_window(setup):
    model, x, A = setup
    grid = [x.t * mpmath.mpf(2) ** -k for k in range(6)]
    r = antiderivative_residual(model, KernelParams(32, A), x, grid, RHO2)
    assert r.slope_defect < 0.01 and math.isfinite(r.a5_hat)
    assert r.to_json()["config"]["m"] == 32
    rows = r.csv().splitlines()
    assert rows[0] == "abs_z,m,residual" and len(rows) == 7
    with pytest.raises(DomainError):
        antiderivative_residual(model, KernelParams(32, A), x, [0.5], RHO2)


def test_residual_quadratic_regime(setup):
    model, x, A = setup
    G = g_x(model, KernelParams(32, A), x)
    beta = omega_dz_at(model, x)
    u = x.t / abs(x.t)
    res = [abs(G(r * u) - beta * r * u) for r in (0.004, 0.002, 0.001)]
    assert res[1] / res[0] <= 0.6 and res[2] / res[1] <= 0.6


def test_residual_decays_geometrically_in_m(setup):
    model, x, A = setup
    beta = omega_dz_at(model, x)
    z = x.t / 2
    ms = [8, 12, 16, 24]
    logs = [float(mpmath.log(abs(g_x(model, KernelParams(m, A), x)(z) - beta * z))) for m in ms]
    slope = np.polyfit(ms, logs, 1)[0]
    assert slope <= math.log(RHO2) + 0.05


def test_leakage_order():
    assert leakage_order(0.5, 2) == 32
    m = leakage_order(0.91, 5)
    assert 5 * 0.91 ** m <= 1e-3 < 5 * 0.91 ** (m - 1)
    with pytest.raises(DomainError):
        leakage_order(1.0, 3)


def test_working_grid_stays_outside_x_and_inside_window():
    zx = mpmath.mpf("1e-4") * mpmath.expjpi(0.3)
    for m in (32, 90):
        pts = working_grid(zx, m)
        assert pts[0] == zx and len(pts) > 8
        assert all(abs(z) >= abs(zx) * (1 - 1e-30) and abs(z - zx) < 1 / (3 * m) for z in pts)


def test_residual_bounded_on_working_grid(setup):
    model, x, A = setup
    r = antiderivative_residual(model, KernelParams(32, A), x, working_grid(x.t, 32), RHO2)
    assert r.a5_hat < 2 and r.slope_defect < 0.01
