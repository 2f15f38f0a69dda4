import random
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from antider_kit.algebra import QT, T, qt_from_coeffs
from antider_kit.cover import (
    BiRational,
    CoverModel,
    DifferentialFamily,
    PrecisionError,
    attest_conditions,
    canonical_model,
    corpus_models,
    euler_derivation,
    fiber,
    inversion_pullback,
    load_model,
    qt_eval,
    power_form_model,
    trace_exact,
    trace_expansion,
    trace_numeric,
    vanishing_polynomial,
)
from antider_kit.exactkernel import DomainError
from antider_kit.plocal import AnchorSet
from antider_kit.textdoc import DocumentError, parse_document

from oracles import root_sum

pytestmark = pytest.mark.usefixtures("hiprec")


def sqrt_cover():
    return CoverModel("w**2 - t", "w", validate=False, name="sqrt")


def cube_cover():
    return CoverModel("w**3 - 1 - t", "w", name="cube")


def values(roots):
    return sorted((complex(w) for w, _ in roots), key=lambda z: (round(z.real, 9), round(z.imag, 9)))


def test_fiber_examples():
    assert values(fiber(sqrt_cover(), 1)) == pytest.approx([-1, 1])
    ram = fiber(sqrt_cover(), 0)
    assert len(ram) == 1 and ram[0][1] == 2 and abs(ram[0][0]) < 1e-20
    cube = values(fiber(cube_cover(), 0))
    oracle = sorted(np.roots([1, 0, 0, -1]), key=lambda z: (round(z.real, 9), round(z.imag, 9)))
    assert cube == pytest.approx(oracle, abs=1e-12)


def test_fiber_multiplicities_sum_to_degree():
    for m in corpus_models().values():
        assert sum(k for _, k in fiber(m, 0.37 - 0.2j)) == m.d


def test_fiber_precision_ceiling():
    with pytest.raises(PrecisionError) as exc:
        fiber(sqrt_cover(), 0, prec=64, max_prec=64)
    assert exc.value.suggested > 64


def test_trace_numeric_examples():
    sq = sqrt_cover()
    for a in (mpmath.mpf(2), mpmath.mpc(0.3, -1.1)):
        assert abs(trace_numeric(sq, "w", a)) < 1e-60
        assert abs(trace_numeric(sq, "w**2", a) - 2 * a) < 1e-60
    assert abs(trace_numeric(cube_cover(), "w", 0)) < 1e-60


def test_trace_numeric_reports_pole():
    with pytest.raises(DomainError):
        trace_numeric(sqrt_cover(), BiRational.ratio(1, "w - 2"), 4)


def test_trace_exact_examples():
    sq = sqrt_cover()
    assert trace_exact(sq, "w") == QT.zero
    tr = trace_exact(sq, BiRational.ratio(1, "w - 2"))
    assert tr == 4 / (T - 4)
    # fiber-sum oracle at t = 1: 1/(1-2) + 1/(-1-2) = -4/3
    assert abs(trace_numeric(sq, BiRational.ratio(1, "w - 2"), 1) + mpmath.mpf(4) / 3) < 1e-60
    assert qt_eval(tr, 1) == pytest.approx(-4 / 3)


def test_trace_exact_zero_divisor():
    m = CoverModel("(w - 2)*(w + t)", "w", validate=False)
    with pytest.raises(DomainError):
        trace_exact(m, BiRational.ratio(1, "w - 2"))


def test_trace_exact_algebraic_properties():
    m = corpus_models()["quartic-mixed"]
    f, g = BiRational.of("w**2 + t"), BiRational.of("3*w - t**2")
    assert trace_exact(m, 5) == 5 * m.d
    assert trace_exact(m, f + g) == trace_exact(m, f) + trace_exact(m, g)
    h = BiRational.of("t**2 - 2")
    assert trace_exact(m, h * f) == (T ** 2 - 2) * trace_exact(m, f)


def test_trace_exact_against_numpy_root_sums():
    m = corpus_models()["quintic-dense"]
    f = BiRational.ratio("w**3 + t", "w - 4")
    tr = trace_exact(m, f)
    for t0 in (0.2, -0.7, 1.3):
        coeffs = [1, t0, -2, 0, t0 ** 2 - 1, 3 + t0]
        oracle = root_sum(coeffs, lambda r: (r ** 3 + t0) / (r - 4))
        assert complex(qt_eval(tr, t0)) == pytest.approx(oracle, rel=1e-9)


def test_trace_exact_matches_numeric_on_corpus():
    rng = random.Random(11)
    for model in corpus_models().values():
        f = BiRational.ratio("w**2 + t*w + 1", "w + 5")
        tr = trace_exact(model, f)
        for _ in range(5):
            a = mpmath.mpc(rng.uniform(-1, 1), rng.uniform(-1, 1))
            assert abs(trace_numeric(model, f, a) - qt_eval(tr, a)) < mpmath.mpf(10) ** -60


def test_euler_derivation_examples():
    assert euler_derivation(T ** 4) == 4 * T ** 4
    assert euler_derivation(QT(7)) == QT.zero
    q, N, l = 1 + 2 * T, 3 - T ** 2, 3
    lhs = euler_derivation(N / q ** l)
    rhs = (q * T * N.diff(T) - l * T * q.diff(T) * N) / q ** (l + 1)
    assert lhs == rhs


rationals = st.lists(st.integers(-6, 6), min_size=1, max_size=4)


@settings(max_examples=30, deadline=None)
@given(rationals, rationals, rationals)
def test_euler_leibniz_and_inversion(a, b, c):
    f = qt_from_coeffs(a)
    g = qt_from_coeffs(b) / (qt_from_coeffs(c) if any(c) else QT.one)
    assert euler_derivation(f * g) == euler_derivation(f) * g + f * euler_derivation(g)
    assert inversion_pullback(inversion_pullback(g)) == g
    assert inversion_pullback(euler_derivation(g)) == -euler_derivation(inversion_pullback(g))


def test_inversion_pullback_examples():
    assert inversion_pullback(T ** 3) == T ** -3
    assert inversion_pullback(qt_from_coeffs([1, 2, 3])) == qt_from_coeffs([3, 2, 1]) / T ** 2


def test_vanishing_polynomial_pole_on_central_fiber():
    m = CoverModel("w**2 - t", BiRational.ratio(1, "w"), validate=False)
    with pytest.raises(DomainError):
        vanishing_polynomial(m)
    q = vanishing_polynomial(m, check_fiber=False)
    # Res_w(w^2 - t, w) = -t
    assert q.coeffs == (0, -1) and not q.fiber_clear and not q.ok


def test_vanishing_polynomial_unit_cases():
    q = vanishing_polynomial(CoverModel("w**2 - 1 - t", "w"))
    assert q.coeffs == (1,) and q.unit and q.ok
    assert vanishing_polynomial(canonical_model(3)).ok


def test_vanishing_polynomial_annihilates_poles():
    m = corpus_models()["rational-tau"]
    q = vanishing_polynomial(m)
    assert not q.unit and q.fiber_clear
    # tau = w/(w+2) has its pole where w = -2, i.e. t = 9/2 on the curve
    t0 = Fraction(9, 2)
    assert (-2) ** 3 - t0 * (-2) - 1 == 0
    assert sum(c * t0 ** j for j, c in enumerate(q.coeffs)) == 0


def test_trace_expansion_integral_on_canonical():
    m = canonical_model(3)
    for l in range(4):
        for derived in (False, True):
            ex = trace_expansion(m, m.family.e[1], l, derived)
            assert ex.integral
    ex = trace_expansion(corpus_models()["rational-tau"], "1", 2)
    assert ex.q_power >= 1


def test_attest_canonical_exact_at_centre():
    m = canonical_model(3)
    rep = attest_conditions(m, AnchorSet(3, 2, 0.01))
    assert rep.ok and rep.anchors_distinct
    with mpmath.workprec(256):
        for w in rep.fiber_t0:
            assert abs(w ** 3 - 1) < 1e-60


def test_attest_proximity_scales_like_inverse_s():
    # curve fixed in t, only the scale varies: samples at |t| < 2/s shrink like 1/s
    a = attest_conditions(CoverModel("w**3 - t*w - 1", "w", 100), AnchorSet(3, 2, 0.01))
    b = attest_conditions(CoverModel("w**3 - t*w - 1", "w", 400), AnchorSet(3, 2, 0.01))
    assert b.max_proximity < a.max_proximity / 3
    assert b.a2_hat == pytest.approx(a.a2_hat, rel=0.2)


def test_attest_repeated_tau_values_fail():
    m = CoverModel("w**2 - 1 - t", "w**2", name="doubled")
    rep = attest_conditions(m, AnchorSet(3, 2, 0.01))
    assert not rep.anchors_distinct and not rep.ok


def test_model_validation():
    with pytest.raises(DomainError):
        CoverModel("w**2 - t", "w")
    with pytest.raises(DomainError):
        CoverModel("w**2 - 1 - t", "w", family=DifferentialFamily([("1", "w")]))
    with pytest.raises(DomainError):
        CoverModel("2*w**2 - 1", "w")


def test_power_form_model_fiber_is_roots_of_unity():
    m = power_form_model(4, [1, 1])
    for w, _ in fiber(m, 0):
        assert abs(w ** 4 - 1) < 1e-60


def test_family_paired_is_null():
    fam = DifferentialFamily.paired("t", "t**2*w")
    assert fam.null_sum().is_zero()


def test_omega_for_paired_family():
    m = CoverModel("w**2 - 1 - t", "w", family=DifferentialFamily.paired(1, "t"))
    assert m.omega_dt.expr == 1


def test_load_model_document(tmp_path):
    p = tmp_path / "m.txt"
    p.write_text("# toy cover\nname = 'doc'\nP = [[-1], [0, -1],\n     [0], [1]]\nscale = '3/2'\n"
                 "family = [('1', 't'), ('-t', '1')]\n")
    m = load_model(p)
    assert m.name == "doc" and m.d == 3 and m.scale == Fraction(3, 2)


def test_document_errors():
    with pytest.raises(DocumentError) as exc:
        parse_document("a = 1\nb = [1,\n")
    assert exc.value.line >= 2
    with pytest.raises(DocumentError):
        parse_document("a = 1\na = 2\n")
    with pytest.raises(DocumentError):
        parse_document("no equals sign\n")
    assert parse_document("x = 'a # b'  # note\n") == {"x": "a # b"}


def test_corpus_has_ten_models_of_degree_at_most_five():
    cm = corpus_models()
    assert len(cm) == 10 and all(m.d <= 5 for m in cm.values())


def test_document_integer_ranges():
    assert parse_document("m = [1..4, 9]\nx = 'a..b'\n") == {"m": [1, 2, 3, 4, 9], "x": "a..b"}
