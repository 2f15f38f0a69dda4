"""Acceptance criteria 1-10, each run at its stated tolerance and time limit.

Every criterion is a function returning ``(passed, detail, report)``; the
report holds no timing so reruns can be compared byte for byte.  One
``criterion N PASS|FAIL`` line per criterion is printed and repeated in the
terminal summary.
"""

import json
import math
import random
import time
from functools import cache

import mpmath
import pytest

from antider_kit.antideriv import antiderivative_residual, leakage_order, working_grid
from antider_kit.arithcheck import (
    RefusalError,
    exact_residue,
    height_bound,
    integrality_check,
    lemma24_experiment,
)
from antider_kit.cli import ExperimentConfig, emit_report, harvest_height_inputs, run_experiment
from antider_kit.cover import (
    BiRational,
    CoverModel,
    CoverPoint,
    canonical_model,
    corpus_models,
    fiber,
    qt_eval,
    trace_exact,
    trace_numeric,
)
from antider_kit.exactkernel import binom, coefficient_inequalities, split_coefficients
from antider_kit.plocal import (
    AnchorSet,
    KernelParams,
    ProjPoint,
    kernel_eval,
    neardiag_lipschitz_check,
    offdiag_decay_scan,
)

from oracles import slot_split_coefficients

SEED = 0
PREC = 256


# -- criteria -----------------------------------------------------------------------------------


def c1_coefficients():
    bad = {"sum_one": [], "integral": [], "symmetric": [], "head": [], "tail": []}
    for m in range(1, 201):
        sc = split_coefficients(m)
        c = binom(2 * m, m)
        if sum(sc.values) != 1:
            bad["sum_one"].append(m)
        if any((c * b).denominator != 1 for b in sc.values):
            bad["integral"].append(m)
        if any(sc[l] != sc[m - l] for l in range(m + 1)):
            bad["symmetric"].append(m)
        ineq = coefficient_inequalities(m)
        for k in ("head", "tail"):
            if not ineq[k]:
                bad[k].append(m)
    failed = {k: v for k, v in bad.items() if v}
    detail = "all properties hold for m in 1..200" if not failed else f"failing m: {failed}"
    return not failed, detail, {"failing_m": bad}


def c2_slot_split():
    rows = {}
    for m in range(1, 9):
        rows[m] = list(split_coefficients(m).values) == slot_split_coefficients(m)
    ok = all(rows.values())
    return ok, f"exact match for m = 1..8: {ok}", {"match": {str(m): v for m, v in rows.items()}}


def c3_decay():
    A = AnchorSet(37, 2, 0.02, PREC)
    ms = [8, 16, 32, 64]
    scan = offdiag_decay_scan(KernelParams(8, A, PREC), ms, 9, SEED)
    rates = {r["m"]: r["sup_pow_inv_m"] for r in scan.per_m}
    below = all(v < 1 for v in rates.values())
    variation = abs(rates[64] - rates[32]) / rates[32]
    with mpmath.workprec(PREC):
        p1 = KernelParams(1, A, PREC)
        x = ProjPoint.at(A.anchors[0])
        closed = max(abs(kernel_eval(p1, x, ProjPoint.at(a))) for a in A.anchors[1:])
        gap = abs(closed - mpmath.cos(mpmath.pi / 37))
    m1_ok = gap < mpmath.mpf(10) ** -20
    ok = below and variation < 0.05 and m1_ok
    detail = (f"sup^(1/m) = {', '.join(f'{m}:{rates[m]:.6f}' for m in ms)} (need < 1: {below}); "
              f"variation 32->64 {variation:.2e}; m=1 closed form gap {float(gap):.1e}")
    report = {"scan": scan.to_json(), "variation": variation, "m1_gap": float(gap), "m1_ok": bool(m1_ok)}
    return ok, detail, report


def c4_lipschitz():
    A = AnchorSet(37, 2, 0.02, PREC)
    out, ok = {}, True
    for m in (8, 32):
        r = neardiag_lipschitz_check(KernelParams(m, A, PREC), 10_000, SEED)
        out[str(m)] = r.to_json()
        ok &= not r.violations and not r.vacuous
    detail = "; ".join(f"m={m}: {v['eligible']} eligible, {len(v['violations'])} violations, "
                       f"max |f-1|/(m|dw|) {v['max_ratio']:.3f}" for m, v in out.items())
    return ok, detail, out


def c5_trace():
    tol = mpmath.mpf(10) ** -(int(PREC * math.log10(2)) - 10)
    rng = random.Random(SEED)
    worst, per_model = mpmath.mpf(0), {}
    with mpmath.workprec(PREC):
        for name, model in corpus_models().items():
            f = model.tau ** 2 + BiRational.ratio("w**2 + t*w + 1", "w + 5")
            ex = trace_exact(model, f)
            gap = mpmath.mpf(0)
            for _ in range(100):
                a = mpmath.mpc(rng.uniform(-1, 1), rng.uniform(-1, 1))
                gap = max(gap, abs(trace_numeric(model, f, a, PREC) - qt_eval(ex, a)))
            per_model[name] = float(gap)
            worst = max(worst, gap)
    ok = len(per_model) == 10 and worst < tol
    return ok, f"10 covers x 100 points, worst gap {float(worst):.1e} (tolerance {float(tol):.0e})", per_model


def _rho2(d: int) -> tuple[float, AnchorSet]:
    A = AnchorSet(d, 2, 0.01, PREC)
    return offdiag_decay_scan(KernelParams(8, A, PREC), [8, 16, 32, 64], 9, SEED).rho1_hat, A


def c6_residual():
    rows, a5, slope_ok = [], 0.0, True
    with mpmath.workprec(PREC):
        zx = mpmath.mpf("1e-4") * mpmath.expjpi(0.3)
        for name, model in corpus_models().items():
            if model.family is None:
                continue
            rho2, A = _rho2(model.d)
            m = leakage_order(rho2, A.n1)
            grid = working_grid(zx, m)
            for sheet, (w, _) in enumerate(fiber(model, zx, PREC)):
                r = antiderivative_residual(model, KernelParams(m, A, PREC), CoverPoint(zx, w), grid, rho2)
                rows.append({"model": name, "sheet": sheet, "m": m, "rho2_hat": rho2, "a5": r.a5_hat,
                             "slope_defect": r.slope_defect})
                a5 = max(a5, r.a5_hat)
                slope_ok &= r.slope_defect < 0.01
    worst_slope = max(r["slope_defect"] for r in rows)
    ok = bool(rows) and math.isfinite(a5) and slope_ok
    detail = (f"{len({r['model'] for r in rows})} families, {len(rows)} sheets: fitted a5 = {a5:.3f}, "
              f"worst slope defect {worst_slope:.1e} (need < 1e-2)")
    return ok, detail, {"rows": rows, "a5_hat": a5}


def c7_integrality():
    model = canonical_model(3)
    recs = [integrality_check(model, m) for m in range(7)]
    ok = all(r.passed and isinstance(r.exact, int) for r in recs)
    bad = CoverModel("w**3 - t*w - 1", "w/(w + 2)", family=model.family, name="non-unit-q")
    try:
        exact_residue(bad, 2)
        refused = False
    except RefusalError:
        refused = True
    worst = max(r.distance for r in recs)
    detail = (f"residues {[r.exact for r in recs]}, worst quadrature distance {worst:.1e}; "
              f"non-unit control refused: {refused}")
    return ok and refused, detail, {"records": [r.to_json() for r in recs], "control_refused": refused}


@cache
def _lemma24():
    rho2, _ = _rho2(2)
    return lemma24_experiment(rho2_hat=rho2)


def c8_lemma24():
    r = _lemma24()
    ok = r.order_s >= 2.8 and r.rate_m <= r.rho2_hat * 1.05
    detail = f"order in s {r.order_s:.3f} (need >= 2.8); rate in m {r.rate_m:.4f} (need <= {r.rho2_hat * 1.05:.4f})"
    return ok, detail, r.to_json()


def c9_height():
    chain = all(binom(2 * m, m) < 4 ** m for m in range(1, 1001))
    res = [height_bound(h) for h in harvest_height_inputs(_lemma24().to_json(), 24)]
    ok = chain and all(r["pivot_ok"] and r["bound_holds"] and r["margin"] > 0 for r in res)
    detail = (f"C(2m,m) < 4^m for m <= 1000: {chain}; {len(res)} harvested inputs, "
              f"min margin {min(r['margin'] for r in res):.3f}")
    return ok, detail, {"chain": chain, "height": res}


CRITERIA = {
    1: ("exact coefficient suite", 5, c1_coefficients),
    2: ("slot-split oracle", 30, c2_slot_split),
    3: ("off-diagonal decay", 120, c3_decay),
    4: ("near-diagonal Lipschitz bound", 60, c4_lipschitz),
    5: ("trace oracle equivalence", 60, c5_trace),
    6: ("antiderivative residual", 300, c6_residual),
    7: ("residue integrality", 300, c7_integrality),
    8: ("scale sweep convergence", 600, c8_lemma24),
    9: ("height chain", 1, c9_height),
}


def _dump(report) -> bytes:
    return json.dumps(report, sort_keys=True, default=str).encode()


@cache
def outcome(n: int):
    _, _, fn = CRITERIA[n]
    if n == 9:
        _lemma24()  # harvested inputs come from criterion 8; not charged to criterion 9
    t0 = time.perf_counter()
    with mpmath.workprec(PREC):
        passed, detail, report = fn()
    return bool(passed), detail, _dump(report), time.perf_counter() - t0


def record(log, n, title, passed, detail):
    line = f"criterion {n} {'PASS' if passed else 'FAIL'} [{title}] {detail}"
    print(line)
    log.append(line)


@pytest.mark.filterwarnings("ignore::UserWarning")
@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(n, acceptance_log):
    title, limit, _ = CRITERIA[n]
    passed, detail, _, elapsed = outcome(n)
    in_time = elapsed < limit
    record(acceptance_log, n, title, passed and in_time, f"{detail}; {elapsed:.2f} s (limit {limit} s)")
    assert passed, detail
    assert in_time, f"{elapsed:.2f} s exceeds {limit} s"


@pytest.mark.filterwarnings("ignore::UserWarning")
def test_criterion_10_determinism(acceptance_log, tmp_path):
    differing = []
    for n, (_, _, fn) in CRITERIA.items():
        first = outcome(n)[2]
        with mpmath.workprec(PREC):
            again = _dump(fn()[2])
        if again != first:
            differing.append(n)
    runs = []
    for k in range(2):
        rep = run_experiment(ExperimentConfig.from_text("kernel", "r1 = 0.001\nm_list = [8, 16]\n", seed=SEED))
        out = tmp_path / f"run{k}"
        emit_report(rep, out)
        runs.append({p.name: p.read_bytes() for p in out.iterdir() if p.name != "timing.json"})
    cli_ok = runs[0] == runs[1]
    passed = not differing and cli_ok
    record(acceptance_log, 10, "determinism", passed,
           f"criteria 1-9 rerun byte-identical: {not differing} {differing or ''}; "
           f"runner report files byte-identical: {cli_ok}")
    assert passed
