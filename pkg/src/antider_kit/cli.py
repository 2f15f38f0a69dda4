"""Config-driven experiment runner: ``antider-kit <command> --config <path>``.

Reports are deterministic: identical config and seed give byte-identical
``report.json`` and CSV files.  Wall time goes to a separate ``timing.json``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import mpmath

from . import __version__
from .antideriv import antiderivative_residual, leakage_order, working_grid
from .arithcheck import (
    ContourSpec,
    ConvergenceError,
    HeightInputs,
    contour_integral,
    height_bound,
    integrality_check,
    lemma24_experiment,
    omega_g2_integrand,
)
from .cover import (
    CoverPoint,
    PrecisionError,
    attest_conditions,
    canonical_model,
    fiber,
    load_model,
    qt_eval,
    trace_exact,
    trace_numeric,
    vanishing_polynomial,
)
from .exactkernel import (
    DomainError,
    binom,
    coefficient_inequalities,
    coefficient_table_csv,
    split_coefficients,
)
from .plocal import AnchorSet, ConfigurationError, KernelParams, neardiag_lipschitz_check, offdiag_decay_scan
from .textdoc import DocumentError, parse_document

__all__ = ["COMMANDS", "ExperimentConfig", "ExperimentReport", "emit_report", "main", "run_experiment"]

log = logging.getLogger("antider_kit")

COMMANDS = ("coeffs", "kernel", "cover-check", "antideriv", "contour", "integrality", "lemma24", "height", "sweep")
SCHEMA_VERSION = 1
PRECISION_ENV = "ANTIDER_KIT_PRECISION"

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


def default_precision() -> int:
    raw = os.environ.get(PRECISION_ENV)
    if raw is None:
        return 256
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{PRECISION_ENV}={raw!r} is not an integer") from None


@dataclass
class ExperimentConfig:
    command: str
    params: dict = field(default_factory=dict)
    model_path: str | None = None
    output_dir: str = "."
    seed: int = 0

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        self.params.setdefault("precision", default_precision())

    @classmethod
    def from_text(cls, command: str, text: str, **overrides) -> "ExperimentConfig":
        doc = parse_document(text)
        cmd = doc.pop("command", command) if command is None else command
        model_path = doc.pop("model", None)
        seed = doc.pop("seed", 0)
        out = doc.pop("output_dir", ".")
        cfg = cls(cmd, doc, model_path, out, seed)
        for k, v in overrides.items():
            if v is not None:
                if k in ("seed", "output_dir", "model_path"):
                    setattr(cfg, k, v)
                else:
                    cfg.params[k] = v
        return cfg

    def get(self, key, default=None):
        return self.params.get(key, default)

    def echo(self) -> dict:
        return {"command": self.command, "model": self.model_path, "seed": self.seed,
                "params": {k: _jsonable(v) for k, v in sorted(self.params.items())}}


@dataclass
class ExperimentReport:
    config: dict
    records: dict = field(default_factory=dict)
    verdicts: dict = field(default_factory=dict)
    fitted: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict)  # name -> (header, rows)
    error: str | None = None
    wall_time: float = 0.0
    tool_version: str = __version__

    @property
    def passed(self) -> bool:
        return self.error is None and all(self.verdicts.values())

    def to_json(self) -> dict:
        return {"schema_version": SCHEMA_VERSION, "tool_version": self.tool_version, "config": self.config,
                "verdicts": self.verdicts, "fitted": self.fitted, "records": self.records,
                "error": self.error, "pass": self.passed}


def _jsonable(v):
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, (mpmath.mpf,)):
        return float(v)
    if isinstance(v, mpmath.mpc):
        return [float(v.real), float(v.imag)]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    return v


# -- commands ----------------------------------------------------------------------------


def _model(cfg: ExperimentConfig):
    if cfg.model_path:
        return load_model(cfg.model_path)
    return canonical_model(int(cfg.get("d", 3)), g=cfg.get("g"))


def _cmd_coeffs(cfg, rep):
    ms = list(cfg.get("m_list", range(1, 65)))
    sum_one = integral = symmetric = head = tail = True
    for m in ms:
        sc = split_coefficients(m)
        sum_one &= sum(sc.values) == 1
        try:
            sc.scaled()
        except ArithmeticError:
            integral = False
        symmetric &= all(sc[l] == sc[m - l] for l in range(m + 1))
        ineq = coefficient_inequalities(m)
        head &= ineq["head"]
        tail &= ineq["tail"]
    rep.verdicts.update(sum_one=sum_one, integral=integral, symmetric=symmetric,
                        inequality_head=head, inequality_tail=tail)
    rows = list(csv.reader(io.StringIO(coefficient_table_csv(ms))))
    rep.tables["coefficients"] = (rows[0], rows[1:])
    rep.records["m_list"] = ms


def _anchor_set(cfg):
    return AnchorSet(int(cfg.get("n1", 37)), int(cfg.get("g_genus", 2)), float(cfg.get("r1", 0.02)),
                     int(cfg.get("precision")))


def _cmd_kernel(cfg, rep):
    A = _anchor_set(cfg)
    ms = list(cfg.get("m_list", [8, 16, 32, 64]))
    scan = offdiag_decay_scan(KernelParams(ms[0], A, A.precision), ms, int(cfg.get("samples_per_disk", 9)),
                              cfg.seed)
    rep.records["scan"] = scan.to_json()
    rep.fitted["rho1_hat"] = scan.rho1_hat
    rates = {r["m"]: r["sup_pow_inv_m"] for r in scan.per_m}
    rep.verdicts["decay_below_one"] = all(v < 1 for v in rates.values())
    rep.verdicts["rate_consistency"] = all(c["ok"] for c in scan.rate_consistency)
    if len(ms) >= 2:
        a, b = rates[ms[-2]], rates[ms[-1]]
        rep.records["rate_variation"] = abs(b - a) / a
        rep.verdicts["rate_stable"] = abs(b - a) / a < 0.05
    trials = int(cfg.get("lipschitz_trials", 1000))
    lip = {}
    for m in cfg.get("lipschitz_m", [8, 32]):
        r = neardiag_lipschitz_check(KernelParams(m, A, A.precision), trials, cfg.seed)
        lip[str(m)] = r.to_json()
        rep.verdicts[f"lipschitz_m{m}"] = not r.violations and not r.vacuous
    rep.records["lipschitz"] = lip
    rep.tables["kernel_grid"] = (["m", "i", "j", "value"], [list(r) for r in sorted(scan.grid)])


def _cmd_cover_check(cfg, rep):
    model = _model(cfg)
    prec = int(cfg.get("precision"))
    rep.records["model"] = model.describe()
    A = AnchorSet(model.n1, 2, float(cfg.get("r1", 0.01)), prec) if model.n1 > 1 else None
    if A is not None:
        att = attest_conditions(model, A)
        rep.records["attestation"] = att.to_json()
        rep.fitted["a2_hat"] = att.a2_hat
        rep.fitted["a1_hat"] = att.a1_hat
        rep.verdicts["attestation"] = att.ok
    q = vanishing_polynomial(model, check_fiber=False)
    rep.records["q"] = {"coeffs": list(q.coeffs), "leading": q.leading, "unit": q.unit, "fiber_clear": q.fiber_clear}
    import numpy as np
    rng = np.random.default_rng(cfg.seed)
    f = model.family.e[0] if model.family else model.tau
    worst = 0.0
    ex = trace_exact(model, f)
    with mpmath.workprec(prec):
        for _ in range(int(cfg.get("trace_points", 20))):
            a = mpmath.mpc(float(rng.uniform(-1, 1)), float(rng.uniform(-1, 1)))
            worst = max(worst, float(abs(trace_numeric(model, f, a, prec) - qt_eval(ex, a))))
    rep.records["trace_max_gap"] = worst
    rep.verdicts["trace_agreement"] = worst < 10 ** -(int(prec * math.log10(2)) - 10)


def _kernel_rho(d, r1, prec, seed=0, ms=(8, 16, 32, 64)):
    A = AnchorSet(d, 2, r1, prec)
    return offdiag_decay_scan(KernelParams(ms[0], A, prec), list(ms), 9, seed).rho1_hat, A


def _cmd_antideriv(cfg, rep):
    model = _model(cfg)
    prec = int(cfg.get("precision"))
    rho2, A = _kernel_rho(model.d, float(cfg.get("r1", 0.01)), prec, cfg.seed)
    m = cfg.get("m", "auto")
    m = leakage_order(rho2, A.n1) if m == "auto" else int(m)
    rep.fitted["rho2_hat"] = rho2
    rep.records["m"] = m
    radius = float(cfg.get("working_radius", 1e-4))
    angle = float(cfg.get("angle", 0.3))
    best = []
    with mpmath.workprec(prec):
        zx = radius * mpmath.expjpi(angle)
        grid = working_grid(zx, m, int(cfg.get("grid_levels", 8)), int(cfg.get("grid_angles", 8)))
        for w, _ in fiber(model, zx, prec):
            best.append(antiderivative_residual(model, KernelParams(m, A, prec), CoverPoint(zx, w), grid, rho2,
                                                radius))
    rep.records["residuals"] = [r.to_json() for r in best]
    a5 = max(r.a5_hat for r in best)
    rep.fitted["a5_hat"] = a5
    rep.verdicts["a5_finite"] = math.isfinite(a5)
    rep.verdicts["leading_slope"] = all(r.slope_defect < 0.01 for r in best)
    rep.tables["residuals"] = (["abs_z", "m", "residual"],
                               [[repr(abs(complex(z))), m, repr(v)] for r in best for z, v in zip(r.grid, r.residuals)])


def _contour_spec(cfg):
    return ContourSpec(float(cfg.get("radius", 1.0)), int(cfg.get("nodes", 32)), int(cfg.get("precision")))


def _cmd_contour(cfg, rep):
    model = _model(cfg)
    m = int(cfg.get("m", 2))
    val = contour_integral(omega_g2_integrand(model, m), _contour_spec(cfg), model)
    rep.records["value"] = [float(val.real), float(val.imag)]
    rep.records["scaled_value"] = [float((binom(2 * m, m) * val).real), float((binom(2 * m, m) * val).imag)]


def _cmd_integrality(cfg, rep):
    model = _model(cfg)
    spec = _contour_spec(cfg)
    out = []
    for m in cfg.get("m_list", list(range(0, 7))):
        r = integrality_check(model, int(m), spec)
        out.append(r.to_json())
        rep.verdicts[f"m{m}"] = r.passed
    rep.records["integrality"] = out
    rep.tables["integrality"] = (["model_id", "m", "exact", "distance", "pass"],
                                 [[r["model_id"], r["m"], r["exact"], repr(r["distance"]), r["pass"]] for r in out])


def _lemma24(cfg):
    d = int(cfg.get("d", 2))
    g = cfg.get("g", "z*w")
    prec = int(cfg.get("precision"))
    rho2, _ = _kernel_rho(d, float(cfg.get("r1", 0.01)), prec, 0)
    return lemma24_experiment(tuple(cfg.get("scale_list", [100, 200, 400, 800])), int(cfg.get("m_fixed", 24)),
                              tuple(cfg.get("m_list", [2, 4, 6, 8, 10, 12])), cfg.get("s_fixed", 1000), d, rho2,
                              g=g)


def _cmd_lemma24(cfg, rep):
    r = _lemma24(cfg)
    rep.records["lemma24"] = r.to_json()
    rep.fitted.update(rho2_hat=r.rho2_hat, a10_hat=r.a10_hat, a11_hat=r.a11_hat, order_s=r.order_s, rate_m=r.rate_m)
    rep.verdicts["order_s"] = r.order_s >= 2.8
    rep.verdicts["rate_m"] = r.rate_m <= r.rho2_hat * 1.05
    rep.tables["lemma24"] = (["s", "m", "err", "bound", "pass"], [[s, m, repr(e), repr(b), p]
                                                                    for s, m, e, b, p in r.table_rows()])


def harvest_height_inputs(lemma: dict, m: int, a9: float = 0.5, omega_norm: float = 1.0) -> list[HeightInputs]:
    """One input per swept scale: ``||xi_1|| = s``, ``sum beta^2`` from the sweep."""
    out = []
    for s, b in sorted(lemma["beta"].items(), key=lambda kv: float(Fraction(kv[0]))):
        out.append(HeightInputs(1, math.log(float(Fraction(s))), (float(Fraction(b)),), omega_norm, a9, m))
    return out


def _cmd_height(cfg, rep):
    if cfg.get("from_lemma24", False):
        lemma = _lemma24(cfg).to_json()
        m = int(cfg.get("m", 24))
        inputs = harvest_height_inputs(lemma, m, float(cfg.get("a9", 0.5)), float(cfg.get("omega_norm", 1.0)))
    else:
        inputs = [HeightInputs(int(cfg.get("degree", 1)), float(cfg.get("log_norm_xi1")),
                               tuple(cfg.get("beta_sums")), float(cfg.get("omega_norm", 1.0)),
                               float(cfg.get("a9", 0.5)), int(cfg.get("m", 24)), cfg.get("a7"))]
    results = [height_bound(h) for h in inputs]
    rep.records["height"] = results
    mmax = int(cfg.get("chain_m_max", 1000))
    rep.verdicts["central_binomial_chain"] = all(binom(2 * k, k) < 4 ** k for k in range(1, mmax + 1))
    rep.verdicts["hypothesis"] = all(r["hypothesis_ok"] for r in results)
    rep.verdicts["bound_holds"] = all(r.get("bound_holds") for r in results)
    rep.verdicts["pivot"] = all(r.get("pivot_ok") for r in results)


def _cmd_sweep(cfg, rep):
    sub = cfg.get("sweep_command")
    key = cfg.get("sweep_key")
    if sub not in COMMANDS or sub == "sweep" or key is None:
        raise ConfigError("sweep needs sweep_command (a non-sweep command) and sweep_key")
    for v in cfg.get("sweep_values", []):
        params = dict(cfg.params)
        params[key] = v
        child = ExperimentConfig(sub, params, cfg.model_path, cfg.output_dir, cfg.seed)
        r = ExperimentReport(child.echo())
        _HANDLERS[sub](child, r)
        tag = f"{key}={v}"
        rep.records[tag] = {"verdicts": r.verdicts, "fitted": r.fitted}
        for k, ok in r.verdicts.items():
            rep.verdicts[f"{tag}:{k}"] = ok
        for k, val in r.fitted.items():
            rep.fitted[f"{tag}:{k}"] = val


_HANDLERS = {
    "coeffs": _cmd_coeffs,
    "kernel": _cmd_kernel,
    "cover-check": _cmd_cover_check,
    "antideriv": _cmd_antideriv,
    "contour": _cmd_contour,
    "integrality": _cmd_integrality,
    "lemma24": _cmd_lemma24,
    "height": _cmd_height,
    "sweep": _cmd_sweep,
}


def run_experiment(config: ExperimentConfig, report: ExperimentReport | None = None) -> ExperimentReport:
    """Dispatch ``config.command``.  Records land in ``report`` as they are
    produced, so a caller holding it keeps partial results on failure."""
    rep = report if report is not None else ExperimentReport(config.echo())
    t0 = time.perf_counter()
    try:
        with mpmath.workprec(int(config.get("precision"))):
            _HANDLERS[config.command](config, rep)
    finally:
        rep.wall_time = time.perf_counter() - t0
    return rep


def emit_report(report: ExperimentReport, output_dir, formats=("json", "csv")) -> list[Path]:
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if "json" in formats:
        p = out / "report.json"
        p.write_text(json.dumps(_jsonable(report.to_json()), indent=2, sort_keys=True) + "\n", encoding="utf-8")
        written.append(p)
        t = out / "timing.json"
        t.write_text(json.dumps({"wall_time_s": report.wall_time}) + "\n", encoding="utf-8")
    if "csv" in formats:
        for name, (header, rows) in sorted(report.tables.items()):
            p = out / f"{name}.csv"
            buf = io.StringIO()
            buf.write(f"# columns: {', '.join(map(str, header))}\n")
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow(row)
            p.write_text(buf.getvalue(), encoding="utf-8")
            written.append(p)
    return written


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="antider-kit", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", help="key = value document")
    ap.add_argument("--out", default=None, help="output directory")
    ap.add_argument("--seed", type=int, default=None)
    ap.add_argument("--precision", type=int, default=None, help=f"bits (default ${PRECISION_ENV} or 256)")
    ap.add_argument("--format", action="append", choices=["json", "csv"])
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    try:
        text = Path(args.config).read_text(encoding="utf-8") if args.config else ""
        cfg = ExperimentConfig.from_text(args.command, text, seed=args.seed, output_dir=args.out,
                                         precision=args.precision)
        if cfg.model_path and args.config and not os.path.isabs(cfg.model_path):
            cfg.model_path = str(Path(args.config).parent / cfg.model_path)
    except (DocumentError, ConfigError, OSError) as exc:
        log.error("configuration error: %s", exc)
        return EXIT_CONFIG
    formats = tuple(args.format or ("json", "csv"))
    rep = ExperimentReport(cfg.echo())
    try:
        run_experiment(cfg, rep)
    except (ConfigurationError, ConfigError, DocumentError) as exc:
        log.error("configuration error: %s", exc)
        rep.error, code = f"configuration: {exc}", EXIT_CONFIG
    except (ConvergenceError, PrecisionError) as exc:
        log.error("numerical escalation exhausted: %s", exc)
        rep.error, code = f"numerical: {exc}", EXIT_NUMERIC
    except DomainError as exc:
        log.error("domain error: %s", exc)
        rep.error, code = f"domain: {exc}", EXIT_CONFIG
    else:
        code = EXIT_PASS if rep.passed else EXIT_FAIL
    try:
        emit_report(rep, cfg.output_dir, formats)
    except OSError as exc:
        log.error("cannot write output: %s", exc)
        return EXIT_CONFIG
    for k, v in sorted(rep.verdicts.items()):
        log.info("%-32s %s", k, "pass" if v else "FAIL")
    return code


if __name__ == "__main__":
    sys.exit(main())
