"""Command line front end: certify / simulate / sweep / selfcheck.

The run configuration is a single JSON document; every output file embeds
the fully resolved configuration (including the snapped delay and the
derived time step) so results are reproducible from the artifact alone.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import analysis, certificate, solver, svgplot
from .energy import check_dissipation
from .kernel import KernelInvalid, MemoryKernel, validate_kernel

__all__ = ["main", "ConfigError", "RunConfig", "load_config"]

CSV_FLOAT = "%.17g"
ENERGY_HEADER = "t,total,kinetic,elastic,memory,delay"
SWEEP_HEADER = "k,sigma_emp,r_squared,classification,certified,theorem_bound_ok"


class ConfigError(ValueError):
    """Configuration problem, annotated with the offending field path."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


# -- config ingestion -----------------------------------------------------------

_TOP_LEVEL_KEYS = {
    "kernel", "L", "nx", "cfl", "ns", "tail_tol",
    "tau", "k", "theta", "mode", "delay_realization", "memory_realization",
    "init", "T", "sample_every", "snapshots", "c_poincare",
    "k_values", "k_min", "k_max", "count", "theta_values",
}


@dataclass
class RunConfig:
    kernel: MemoryKernel = MemoryKernel()
    length: float = 1.0
    nx: int = 200
    cfl: float = 0.25
    ns: int = 64
    tail_tol: float = 1e-8
    tau: float = 0.0
    k: float = 0.0
    theta: float = 2.0
    mode: str = "original"
    delay_realization: str = "ring_buffer"
    memory_realization: str = "prony_modes"
    init: solver.InitialData = field(default_factory=solver.InitialData)
    horizon: float | None = None
    sample_every: int = 0
    snapshots: bool = False
    c_poincare: float | None = None
    k_values: list[float] | None = None
    theta_values: list[float] | None = None

    def params(self) -> solver.ModelParams:
        return solver.ModelParams(
            length=self.length, tau=self.tau, k=self.k, theta=self.theta,
            kernel=self.kernel, mode=self.mode,
            delay_realization=self.delay_realization,
            memory_realization=self.memory_realization,
        )

    def discretize(self) -> solver.Discretization:
        return solver.discretize(
            self.params(), nx=self.nx, cfl=self.cfl, ns=self.ns,
            tail_tol=self.tail_tol,
        )

    def poincare(self) -> float:
        if self.c_poincare is not None:
            return self.c_poincare
        return certificate.poincare_constant_interval(self.length)


def _require(cond: bool, path: str, message: str) -> None:
    if not cond:
        raise ConfigError(path, message)


def _get_number(doc: dict, key: str, default, path: str, minimum=None,
                strict_min: bool = False):
    if key not in doc:
        return default
    value = doc[key]
    _require(isinstance(value, (int, float)) and not isinstance(value, bool),
             f"{path}{key}", f"expected a number, got {value!r}")
    value = float(value)
    _require(math.isfinite(value), f"{path}{key}", "must be finite")
    if minimum is not None:
        if strict_min:
            _require(value > minimum, f"{path}{key}", f"must be > {minimum}")
        else:
            _require(value >= minimum, f"{path}{key}", f"must be >= {minimum}")
    return value


def _get_int(doc: dict, key: str, default, path: str, minimum=None):
    if key not in doc:
        return default
    value = doc[key]
    _require(isinstance(value, int) and not isinstance(value, bool),
             f"{path}{key}", f"expected an integer, got {value!r}")
    if minimum is not None:
        _require(value >= minimum, f"{path}{key}", f"must be >= {minimum}")
    return value


def _get_choice(doc: dict, key: str, default, path: str, choices):
    if key not in doc:
        return default
    value = doc[key]
    _require(value in choices, f"{path}{key}", f"must be one of {sorted(choices)}")
    return value


def _parse_kernel(doc, path: str) -> MemoryKernel:
    _require(isinstance(doc, dict), path, "expected an object with a 'terms' list")
    unknown = set(doc) - {"terms"}
    _require(not unknown, path, f"unknown keys {sorted(unknown)}")
    terms = doc.get("terms", [])
    _require(isinstance(terms, list), f"{path}.terms", "expected a list")
    pairs = []
    for i, item in enumerate(terms):
        tpath = f"{path}.terms[{i}]"
        _require(isinstance(item, dict), tpath, "expected an object {a, b}")
        unknown = set(item) - {"a", "b"}
        _require(not unknown, tpath, f"unknown keys {sorted(unknown)}")
        _require("a" in item and "b" in item, tpath, "needs both 'a' and 'b'")
        a = item["a"]
        b = item["b"]
        _require(isinstance(a, (int, float)) and not isinstance(a, bool),
                 f"{tpath}.a", "expected a number")
        _require(isinstance(b, (int, float)) and not isinstance(b, bool),
                 f"{tpath}.b", "expected a number")
        pairs.append((float(a), float(b)))
    kernel = MemoryKernel.from_terms(pairs)
    try:
        validate_kernel(kernel)
    except KernelInvalid as err:
        raise ConfigError(f"{path}.terms", str(err)) from err
    return kernel


def _parse_init(doc, path: str) -> solver.InitialData:
    _require(isinstance(doc, dict), path, "expected an object")
    allowed = {"shape", "m", "center", "width", "history", "omega"}
    unknown = set(doc) - allowed
    _require(not unknown, path, f"unknown keys {sorted(unknown)}")
    shape = _get_choice(doc, "shape", "sine", f"{path}.", {"sine", "gaussian", "zero"})
    history = _get_choice(doc, "history", "frozen", f"{path}.", {"frozen", "modulated"})
    try:
        return solver.InitialData(
            shape=shape,
            mode_index=_get_int(doc, "m", 1, f"{path}.", minimum=1),
            center=_get_number(doc, "center", 0.5, f"{path}."),
            width=_get_number(doc, "width", 0.1, f"{path}.", minimum=0.0,
                              strict_min=True),
            history=history,
            omega=_get_number(doc, "omega", 1.0, f"{path}."),
        )
    except ValueError as err:
        raise ConfigError(path, str(err)) from err


def parse_config(doc: dict) -> RunConfig:
    _require(isinstance(doc, dict), "config", "top level must be a JSON object")
    unknown = set(doc) - _TOP_LEVEL_KEYS
    _require(not unknown, "config", f"unknown keys {sorted(unknown)}")

    kernel = _parse_kernel(doc["kernel"], "kernel") if "kernel" in doc else MemoryKernel()
    cfg = RunConfig(
        kernel=kernel,
        length=_get_number(doc, "L", 1.0, "", minimum=0.0, strict_min=True),
        nx=_get_int(doc, "nx", 200, "", minimum=3),
        cfl=_get_number(doc, "cfl", 0.25, "", minimum=0.0, strict_min=True),
        ns=_get_int(doc, "ns", 64, "", minimum=2),
        tail_tol=_get_number(doc, "tail_tol", 1e-8, "", minimum=0.0, strict_min=True),
        tau=_get_number(doc, "tau", 0.0, "", minimum=0.0),
        k=_get_number(doc, "k", 0.0, ""),
        theta=_get_number(doc, "theta", 2.0, "", minimum=0.0, strict_min=True),
        mode=_get_choice(doc, "mode", "original", "", set(solver.MODES)),
        delay_realization=_get_choice(
            doc, "delay_realization", "ring_buffer", "", set(solver.DELAY_REALIZATIONS)),
        memory_realization=_get_choice(
            doc, "memory_realization", "prony_modes", "", set(solver.MEMORY_REALIZATIONS)),
        init=_parse_init(doc.get("init", {}), "init"),
        horizon=_get_number(doc, "T", None, "", minimum=0.0),
        sample_every=_get_int(doc, "sample_every", 0, "", minimum=0),
        c_poincare=_get_number(doc, "c_poincare", None, "", minimum=0.0,
                               strict_min=True),
    )
    if "snapshots" in doc:
        _require(isinstance(doc["snapshots"], bool), "snapshots",
                 "expected true or false")
        cfg.snapshots = doc["snapshots"]
    _require(cfg.cfl <= 0.5, "cfl", "must be <= 0.5 (explicit scheme stability)")

    if "k_values" in doc:
        values = doc["k_values"]
        _require(isinstance(values, list) and values, "k_values",
                 "expected a non-empty list of numbers")
        for i, v in enumerate(values):
            _require(isinstance(v, (int, float)) and not isinstance(v, bool),
                     f"k_values[{i}]", "expected a number")
        cfg.k_values = [float(v) for v in values]
        for key in ("k_min", "k_max", "count"):
            _require(key not in doc, key, "mutually exclusive with k_values")
    elif any(key in doc for key in ("k_min", "k_max", "count")):
        for key in ("k_min", "k_max", "count"):
            _require(key in doc, key, "k_min, k_max and count go together")
        k_min = _get_number(doc, "k_min", None, "")
        k_max = _get_number(doc, "k_max", None, "")
        count = _get_int(doc, "count", None, "", minimum=2)
        _require(k_max > k_min, "k_max", "must exceed k_min")
        cfg.k_values = [float(v) for v in np.linspace(k_min, k_max, count)]
    if "theta_values" in doc:
        values = doc["theta_values"]
        _require(isinstance(values, list) and values, "theta_values",
                 "expected a non-empty list of numbers")
        for i, v in enumerate(values):
            _require(isinstance(v, (int, float)) and not isinstance(v, bool)
                     and float(v) > 1.0,
                     f"theta_values[{i}]", "expected a number > 1")
        cfg.theta_values = [float(v) for v in values]
    return cfg


def load_config(path: str | Path) -> RunConfig:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as err:
        raise ConfigError("config", f"cannot read {path}: {err}") from err
    except json.JSONDecodeError as err:
        raise ConfigError("config", f"invalid JSON in {path}: {err}") from err
    return parse_config(doc)


def resolved_config(cfg: RunConfig, disc: solver.Discretization | None,
                    seed: int) -> dict:
    out = {
        "kernel": {"terms": [{"a": a, "b": b} for a, b in cfg.kernel.terms]},
        "L": cfg.length,
        "nx": cfg.nx,
        "cfl": cfg.cfl,
        "ns": cfg.ns,
        "tail_tol": cfg.tail_tol,
        "tau": cfg.tau,
        "k": cfg.k,
        "theta": cfg.theta,
        "mode": cfg.mode,
        "delay_realization": cfg.delay_realization,
        "memory_realization": cfg.memory_realization,
        "init": {
            "shape": cfg.init.shape,
            "m": cfg.init.mode_index,
            "center": cfg.init.center,
            "width": cfg.init.width,
            "history": cfg.init.history,
            "omega": cfg.init.omega,
        },
        "T": cfg.horizon,
        "sample_every": cfg.sample_every,
        "snapshots": cfg.snapshots,
        "c_poincare": cfg.poincare(),
        "seed": seed,
    }
    if cfg.k_values is not None:
        out["k_values"] = cfg.k_values
    if cfg.theta_values is not None:
        out["theta_values"] = cfg.theta_values
    if disc is not None:
        out["resolved"] = {
            "dx": disc.dx,
            "dt": disc.dt,
            "tau_snapped": disc.tau,
            "n_delay": disc.n_delay,
            "s_max": disc.s_max,
            "ns": disc.ns,
        }
    return out


def _config_comment(resolved: dict) -> str:
    return json.dumps(resolved, sort_keys=True, separators=(",", ":"))


# -- certify ---------------------------------------------------------------------

def _certificate_inputs(cfg: RunConfig, tau: float | None = None,
                        theta: float | None = None,
                        k: float | None = None) -> certificate.CertificateInputs:
    report = validate_kernel(cfg.kernel, cfg.tail_tol)
    if cfg.kernel.is_empty:
        raise ConfigError("kernel.terms",
                          "certification needs a non-empty memory kernel")
    return certificate.CertificateInputs(
        mu0=report.mu0,
        mu_tilde=report.mu_tilde,
        alpha=report.alpha,
        tau=cfg.tau if tau is None else tau,
        theta=cfg.theta if theta is None else theta,
        c_poincare=cfg.poincare(),
        k=cfg.k if k is None else k,
    )


def cmd_certify(cfg: RunConfig, out_dir: Path, seed: int) -> int:
    inputs = _certificate_inputs(cfg)
    report = certificate.compute_constants(inputs)
    flat = report.as_flat_dict()
    flat["nodelay_threshold"] = certificate.nodelay_threshold(
        inputs.mu0, inputs.mu_tilde, inputs.alpha, inputs.c_poincare
    )
    resolved = resolved_config(cfg, None, seed)
    doc = {"config": resolved, **flat}
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "certificate.json").write_text(
        json.dumps(doc, sort_keys=True, indent=2) + "\n"
    )
    lines = [f"config = {_config_comment(resolved)}"]
    for name in sorted(flat):
        if name == "inputs":
            for iname in sorted(flat["inputs"]):
                lines.append(f"inputs.{iname} = {flat['inputs'][iname]!r}")
        else:
            lines.append(f"{name} = {flat[name]!r}")
    (out_dir / "certificate.txt").write_text("\n".join(lines) + "\n")
    certified = flat["certified"]
    print(f"k = {inputs.k:g}, k0 = {report.k0:.6g}: "
          f"{'certified' if certified else 'NOT certified'}")
    return 0 if certified else 2


# -- simulate --------------------------------------------------------------------

def _write_energy_csv(path: Path, trace: solver.Trace, resolved: dict) -> None:
    lines = [f"# config {_config_comment(resolved)}", ENERGY_HEADER]
    for i in range(trace.times.size):
        lines.append(",".join(
            CSV_FLOAT % value for value in (
                trace.times[i], trace.total[i], trace.kinetic[i],
                trace.elastic[i], trace.memory[i], trace.delay[i],
            )
        ))
    path.write_text("\n".join(lines) + "\n")


def _write_snapshots_csv(path: Path, trace: solver.Trace, resolved: dict) -> None:
    header = "t," + ",".join(f"u{i}" for i in range(1, trace.disc.nx + 1))
    lines = [f"# config {_config_comment(resolved)}", header]
    for snap in trace.snapshots:
        lines.append(",".join(
            CSV_FLOAT % value for value in np.concatenate(([snap.t], snap.u))
        ))
    path.write_text("\n".join(lines) + "\n")


def _fit_and_classify(trace: solver.Trace):
    try:
        fit = analysis.fit_decay_rate(trace)
    except analysis.InsufficientData:
        return None, "inconclusive"
    return fit, analysis.classify(fit)


def _best_certificate(cfg: RunConfig, k: float):
    """Certificate report at |k|, scanning theta_values for the best sigma."""
    if cfg.kernel.is_empty:
        return None
    thetas = cfg.theta_values or [cfg.theta]
    best = None
    for theta in thetas:
        if theta <= 1.0:
            continue
        report = certificate.compute_constants(
            _certificate_inputs(cfg, theta=theta, k=k)
        )
        if best is None or report.sigma > best.sigma:
            best = report
    return best


def cmd_simulate(cfg: RunConfig, out_dir: Path, seed: int) -> int:
    if cfg.horizon is None:
        raise ConfigError("T", "simulate needs a horizon")
    params = cfg.params()
    disc = cfg.discretize()
    resolved = resolved_config(cfg, disc, seed)
    trace = solver.run(params, cfg.init, disc, cfg.horizon,
                       sample_every=cfg.sample_every, snapshots=cfg.snapshots)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_energy_csv(out_dir / "energy.csv", trace, resolved)
    if cfg.snapshots:
        _write_snapshots_csv(out_dir / "snapshots.csv", trace, resolved)

    fit, classification = _fit_and_classify(trace)
    theorem = None
    dissipation = None
    cert = _best_certificate(cfg, cfg.k)
    if cert is not None and cfg.mode == "original" and cert.sigma > 0.0 \
            and cert.certified and trace.aborted_step is None:
        theorem = analysis.check_theorem_bound(trace, cert.sigma)
    if cfg.mode == "auxiliary" and trace.aborted_step is None:
        dissipation = check_dissipation(trace, params)

    report_doc = {
        "config": resolved,
        "aborted_step": trace.aborted_step,
        "classification": classification,
        "fit": None if fit is None else {
            "sigma_emp": fit.sigma_emp,
            "r_squared": fit.r_squared,
            "window": list(fit.window),
            "n_samples": fit.n_samples,
        },
        "certificate": None if cert is None else cert.as_flat_dict(),
        "theorem_bound": None if theorem is None else {
            "ok": theorem.ok,
            "worst_margin": theorem.worst_margin,
            "first_violation_t": theorem.first_violation_t,
            "sigma": theorem.sigma,
        },
        "dissipation": None if dissipation is None else {
            "passed": dissipation.passed,
            "max_increment": dissipation.max_increment,
            "max_violation": dissipation.max_violation,
            "increment_tol": dissipation.increment_tol,
            "violation_tol": dissipation.violation_tol,
        },
    }
    (out_dir / "report.json").write_text(
        json.dumps(report_doc, sort_keys=True, indent=2) + "\n"
    )

    series = [(trace.times, trace.total, "F(t)")]
    if cert is not None and cert.sigma > 0.0 and trace.total[0] > 0.0:
        envelope = trace.total[0] * np.exp(1.0 - cert.sigma * trace.times)
        series.append((trace.times, envelope, "certified envelope"))
    svg = svgplot.render_log_plot(
        series, title="energy decay", comment=f"config {_config_comment(resolved)}"
    )
    (out_dir / "energy.svg").write_text(svg + "\n")

    if trace.aborted_step is not None:
        print(f"aborted: non-finite state at step {trace.aborted_step}", file=sys.stderr)
        return 1
    print(f"classification: {classification}"
          + (f", sigma_emp = {fit.sigma_emp:.6g}" if fit is not None else ""))
    return 0


# -- sweep -----------------------------------------------------------------------

def _sweep_row(cfg: RunConfig, k: float) -> analysis.SweepRow:
    try:
        params = solver.ModelParams(
            length=cfg.length, tau=cfg.tau, k=k, theta=cfg.theta,
            kernel=cfg.kernel, mode=cfg.mode,
            delay_realization=cfg.delay_realization,
            memory_realization=cfg.memory_realization,
        )
        disc = solver.discretize(params, nx=cfg.nx, cfl=cfg.cfl, ns=cfg.ns,
                                 tail_tol=cfg.tail_tol)
        trace = solver.run(params, cfg.init, disc, cfg.horizon,
                           sample_every=cfg.sample_every)
        if trace.aborted_step is not None:
            # exponential blow-up outruns float range; that IS a growth verdict
            return analysis.SweepRow(
                k=k, sigma_emp=math.nan, r_squared=math.nan,
                classification="growing", certified=_certified_flag(cfg, k),
                theorem_bound_ok=None,
                error=f"non-finite at step {trace.aborted_step}",
            )
        fit, classification = _fit_and_classify(trace)
        cert = _best_certificate(cfg, k)
        certified = None if cert is None else (abs(k) < cert.k0)
        theorem_ok = None
        if cert is not None and cfg.mode == "original" and cert.sigma > 0.0 \
                and certified:
            theorem_ok = analysis.check_theorem_bound(trace, cert.sigma).ok
        return analysis.SweepRow(
            k=k,
            sigma_emp=math.nan if fit is None else fit.sigma_emp,
            r_squared=math.nan if fit is None else fit.r_squared,
            classification=classification,
            certified=certified,
            theorem_bound_ok=theorem_ok,
        )
    except Exception as err:  # per-row failures recorded, sweep continues
        return analysis.SweepRow(
            k=k, sigma_emp=math.nan, r_squared=math.nan,
            classification="error", certified=None, theorem_bound_ok=None,
            error=str(err),
        )


def _certified_flag(cfg: RunConfig, k: float) -> bool | None:
    try:
        cert = _best_certificate(cfg, k)
    except Exception:
        return None
    return None if cert is None else (abs(k) < cert.k0)


def _bool_cell(value: bool | None) -> str:
    if value is None:
        return ""
    return "true" if value else "false"


def cmd_sweep(cfg: RunConfig, out_dir: Path, seed: int, jobs: int) -> int:
    if cfg.k_values is None:
        raise ConfigError("k_values", "sweep needs k_values or (k_min, k_max, count)")
    if cfg.horizon is None:
        raise ConfigError("T", "sweep needs a horizon")
    ks = sorted(cfg.k_values)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_row, [cfg] * len(ks), ks))
    else:
        rows = [_sweep_row(cfg, k) for k in ks]

    resolved = resolved_config(cfg, cfg.discretize(), seed)
    lines = [f"# config {_config_comment(resolved)}", SWEEP_HEADER]
    for row in rows:
        lines.append(",".join([
            CSV_FLOAT % row.k,
            CSV_FLOAT % row.sigma_emp,
            CSV_FLOAT % row.r_squared,
            row.classification,
            _bool_cell(row.certified),
            _bool_cell(row.theorem_bound_ok),
        ]))
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "sweep.csv").write_text("\n".join(lines) + "\n")
    n_err = sum(1 for row in rows if row.error is not None)
    print(f"sweep: {len(rows)} rows, {n_err} failures")
    return 0


# -- selfcheck -------------------------------------------------------------------

def _check_worked_constants() -> list[str]:
    """Pinned rational identities of the worked kernel mu(t) = e^{-2t}, theta = 2."""
    problems = []
    c_p = 1.0 / math.pi ** 2
    inputs = certificate.CertificateInputs(
        mu0=1.0, mu_tilde=0.5, alpha=2.0, tau=1.0, theta=2.0, c_poincare=c_p, k=0.0
    )
    report = certificate.compute_constants(inputs)
    expected = {
        "c0": 2.0,
        "c1": 8.0 + 8.0 * c_p,
        "c2": 20.0 + 20.0 * c_p,
        "c_star": 68.0 + 68.0 * c_p,
        "c_big": 69.5 + 68.0 * c_p,
        "gamma1": 495.0 / 8.0,
        "gamma2": 45.0 + 73.0 * c_p,
        "k0_explicit_lb": 8.0 * math.exp(-2.0) / (1231.0 + 1168.0 * c_p),
    }
    for name, want in expected.items():
        got = getattr(report, name)
        if not math.isclose(got, want, rel_tol=1e-12, abs_tol=0.0):
            problems.append(f"{name}: got {got!r}, expected {want!r}")
    return problems


def _check_wave_convergence() -> list[str]:
    """Pure-wave order check: max error must drop by >= 3.5x per dx halving."""
    horizon = 1.7
    errors = []
    for nx in (24, 49):
        params = solver.ModelParams()
        disc = solver.discretize(params, nx=nx, cfl=0.25)
        init = solver.InitialData(shape="sine", mode_index=1, history="frozen")
        state = solver.build(params, init, disc)
        n_steps = int(round(horizon / disc.dt))
        for _ in range(n_steps):
            solver.step(state, params, disc)
        x = disc.x_interior(params.length)
        exact = np.sin(np.pi * x) * math.cos(math.pi * state.t)
        errors.append(float(np.abs(state.u - exact).max()))
    ratio = errors[0] / errors[1]
    if ratio < 3.5:
        return [f"convergence ratio {ratio:.2f} < 3.5 (errors {errors})"]
    return []


def _check_dissipativity(seed: int) -> list[str]:
    kernel = MemoryKernel.from_terms([(1.0, 2.0)])
    params = solver.ModelParams(tau=1.0, k=0.0, theta=2.0, kernel=kernel,
                                memory_realization="eta_grid")
    disc = solver.discretize(params, nx=40, ns=24)
    report = solver.dissipativity_spot_check(params, disc, trials=8,
                                             c_shift=1e-8, seed=seed)
    if not report.passed:
        return [f"max quotient {report.max_quotient:.3e} exceeds 1e-8"]
    return []


def cmd_selfcheck(seed: int) -> int:
    checks = [
        ("worked-example constants", _check_worked_constants),
        ("pure-wave convergence", _check_wave_convergence),
        ("dissipativity spot check", lambda: _check_dissipativity(seed)),
    ]
    failed = 0
    for name, fn in checks:
        problems = fn()
        if problems:
            failed += 1
            print(f"FAIL {name}: " + "; ".join(problems))
        else:
            print(f"PASS {name}")
    return 0 if failed == 0 else 1


# -- entry point -----------------------------------------------------------------

def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="viscodelay",
        description="Simulate and certify the viscoelastic wave equation "
                    "with delayed velocity feedback.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, needs_config in (("certify", True), ("simulate", True),
                               ("sweep", True), ("selfcheck", False)):
        p = sub.add_parser(name)
        if needs_config:
            p.add_argument("--config", required=True, help="JSON run configuration")
            p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--seed", type=int, default=0)
        if name == "sweep":
            p.add_argument("--jobs", type=int, default=1)
    args = parser.parse_args(argv)

    try:
        if args.command == "selfcheck":
            return cmd_selfcheck(args.seed)
        cfg = load_config(args.config)
        out_dir = Path(args.out)
        if args.command == "certify":
            return cmd_certify(cfg, out_dir, args.seed)
        if args.command == "simulate":
            return cmd_simulate(cfg, out_dir, args.seed)
        return cmd_sweep(cfg, out_dir, args.seed, args.jobs)
    except (ConfigError, KernelInvalid, certificate.InvalidInputs,
            solver.SolverError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
