"""Command line front end.

Config files are flat ``key = value`` lines.  A line ``[kernel]``,
``[function]`` or ``[inverse]`` opens a new section of that type; sections
may repeat and never nest.  Keys before the first section are global::

    suite = gns
    t = 2, 3
    resolution = 1024

    [kernel]
    family = fractional
    s = 0.25

    [function]
    name = hat
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .corpus import GOLDEN_FUNCTIONS, GOLDEN_KERNELS, golden_function, golden_kernel
from .fields import GridFunction, bbm_limit_check, nonlocal_seminorm
from .kernels import (
    Kernel,
    KappaError,
    NotLevyError,
    SaturationError,
    SetSpec,
    almost_decreasing_kappa,
    levy_modular,
    w_profile,
)
from .levelset import (
    dyadic_decompose,
    lemma_gene_convex_check,
    lemma_young_discrete_check,
    orlicz_upper_bound,
    proof_lower_bound,
)
from .orlicz import luxemburg_norm
from .verify import (
    HypothesisError,
    InequalityReport,
    gns_setup,
    verify_fractional_gns,
    verify_friedrichs,
    verify_gns,
    verify_inverse_problem,
    verify_poincare,
    write_jsonl,
    write_summary_csv,
)
from .young import (
    FractionalParams,
    NonInvertibleError,
    YoungFunction,
    asymptotic_rates,
    check_convexity_phi_p,
    critical_young,
    fit_power,
    growth_theta,
)

SUITES = ("gns", "fractional-gns", "poincare", "friedrichs", "bbm", "lemmas", "inverse", "all")
SECTIONS = ("kernel", "function", "inverse")
GLOBAL_KEYS = {"suite", "mode", "t", "resolution", "p", "d", "out", "tolerance", "workers",
               "omega", "s", "dilations", "s_list", "depth"}
EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class ConfigError(ValueError):
    """Malformed configuration; carries the offending line when known."""

    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        where = f"{path or 'config'}:{line}: " if line is not None else ""
        super().__init__(where + message)


@dataclass
class ExperimentConfig:
    suite: str = "all"
    mode: str = "a"
    t: tuple = (2.0,)
    resolution: int = 1024
    p: float = 2.0
    d: int = 1
    out: str = "results"
    tolerance: float | None = None
    workers: int = 1
    omega: tuple = (0.0, 1.0)
    s: tuple = (0.125, 0.25)
    dilations: tuple = (1.0,)
    s_list: tuple = (0.90, 0.95, 0.99)
    depth: int = 60
    kernels: list = field(default_factory=list)
    functions: list = field(default_factory=list)
    inverse: list = field(default_factory=list)
    base_dir: str = "."


# parsing ---------------------------------------------------------------------


def _floats(text: str) -> tuple:
    return tuple(float(x) for x in text.replace(",", " ").split())


def parse_config_text(text: str, path: str | None = None) -> ExperimentConfig:
    glob: dict[str, tuple[str, int]] = {}
    sections: dict[str, list] = {k: [] for k in SECTIONS}
    current = None
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            if name not in SECTIONS:
                raise ConfigError(f"unknown section [{name}]", no, path)
            current = {"__line__": no}
            sections[name].append(current)
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}", no, path)
        key, val = (x.strip() for x in line.split("=", 1))
        if not key:
            raise ConfigError("empty key", no, path)
        target = glob if current is None else current
        if key in target:
            raise ConfigError(f"duplicate key {key!r}", no, path)
        if current is None and key not in GLOBAL_KEYS:
            raise ConfigError(f"unknown key {key!r}", no, path)
        target[key] = (val, no) if current is None else val
    cfg = ExperimentConfig(base_dir=os.path.dirname(os.path.abspath(path)) if path else ".")
    for key, (val, no) in glob.items():
        try:
            _set_global(cfg, key, val)
        except ValueError as exc:
            raise ConfigError(f"{key}: {exc}", no, path) from None
    cfg.kernels = sections["kernel"]
    cfg.functions = sections["function"]
    cfg.inverse = sections["inverse"]
    return cfg


def _set_global(cfg: ExperimentConfig, key: str, val: str) -> None:
    if key in ("suite", "mode", "out"):
        setattr(cfg, key, val)
    elif key in ("t", "omega", "s", "dilations", "s_list"):
        setattr(cfg, key, _floats(val))
    elif key in ("resolution", "d", "workers", "depth"):
        setattr(cfg, key, int(val))
    elif key in ("p", "tolerance"):
        setattr(cfg, key, float(val))


def load_config(path: str) -> ExperimentConfig:
    if not os.path.isfile(path):
        raise ConfigError(f"config file not found: {path}")
    with open(path) as fh:
        return parse_config_text(fh.read(), path)


def validate(cfg: ExperimentConfig) -> None:
    if cfg.suite not in SUITES:
        raise ConfigError(f"suite must be one of {', '.join(SUITES)}")
    if cfg.mode not in ("a", "mr2"):
        raise ConfigError("mode must be 'a' or 'mr2'")
    if not cfg.t or any(t < 2 for t in cfg.t):
        raise ConfigError("t >= 2 required for every base")
    r = cfg.resolution
    if r < 64 or r > 2 ** 14 or r & (r - 1):
        raise ConfigError("resolution must be a power of two between 2^6 and 2^14")
    if cfg.p < 1 or cfg.d not in (1, 2):
        raise ConfigError("need p >= 1 and d in {1, 2}")
    if cfg.workers < 1:
        raise ConfigError("workers must be positive")
    if cfg.tolerance is not None and cfg.tolerance < 0:
        raise ConfigError("tolerance must be nonnegative")
    if len(cfg.omega) != 2 or cfg.omega[0] >= cfg.omega[1]:
        raise ConfigError("omega must be 'lo hi' with lo < hi")
    for sec in cfg.kernels + cfg.functions:
        for key in ("csv",):
            if key in sec:
                full = _resolve(cfg, sec[key])
                if not os.path.isfile(full):
                    raise ConfigError(f"file not found: {sec[key]}", sec["__line__"])
    for sec in cfg.kernels:
        try:
            build_kernel(sec, cfg.p, cfg.d, cfg.base_dir)
        except (KeyError, ValueError, TypeError) as exc:
            raise ConfigError(f"bad kernel section: {exc}", sec["__line__"]) from None
    for sec in cfg.functions:
        if "name" not in sec and "csv" not in sec:
            raise ConfigError("function section needs 'name' or 'csv'", sec["__line__"])
        if "name" in sec and sec["name"] not in FUNCTION_NAMES:
            raise ConfigError(f"unknown function {sec['name']!r}", sec["__line__"])
    for sec in cfg.inverse:
        if "q" not in sec or "c" not in sec:
            raise ConfigError("inverse section needs 'q' and 'c'", sec["__line__"])


def _resolve(cfg_or_dir, path: str) -> str:
    base = cfg_or_dir.base_dir if isinstance(cfg_or_dir, ExperimentConfig) else cfg_or_dir
    return path if os.path.isabs(path) else os.path.join(base, path)


# object builders ---------------------------------------------------------------

FUNCTION_NAMES = GOLDEN_FUNCTIONS + ("ramp", "hat-unit")


def build_function(sec: dict, resolution: int, base_dir: str = ".") -> GridFunction:
    if "csv" in sec:
        u = GridFunction.from_csv(_resolve(base_dir, sec["csv"]))
        return u.with_values(u.values, label=sec.get("label", os.path.basename(sec["csv"])))
    name = sec["name"]
    if name == "ramp":
        return GridFunction.from_callable(lambda x: x, 0.0, 1.0, resolution + 1, label=name)
    if name == "hat-unit":
        f = lambda x: np.maximum(0.0, 1.0 - np.abs(2 * x - 1))  # noqa: E731
        return GridFunction.from_callable(f, 0.0, 1.0, resolution + 1, label=name)
    return golden_function(name, resolution)


def build_kernel(sec: dict, p: float = 2.0, d: int = 1, base_dir: str = ".") -> Kernel:
    p = float(sec.get("p", p))
    d = int(sec.get("d", d))
    if "name" in sec:
        return golden_kernel(sec["name"], p, d)
    fam = sec.get("family")
    num = lambda k, default=None: float(sec[k]) if k in sec else default  # noqa: E731
    if fam == "fractional":
        return Kernel.fractional(num("s"), p, d, num("scale", 1.0))
    if fam == "piecewise":
        return Kernel.piecewise_fractional(num("s_in"), num("s_out"), num("radius"),
                                           num("c_in", 1.0), num("c_out", 1.0), p, d)
    if fam == "max-fractional":
        return Kernel.max_fractional(num("s1"), num("s2"), p, d)
    if fam == "min-fractional":
        return Kernel.min_fractional(num("s1"), num("s2"), p, d)
    if fam == "indicator":
        return Kernel.indicator_ball(num("radius", 1.0), p, d, num("height", 1.0))
    if fam == "log":
        return Kernel.log_family(num("a"), p, d)
    if fam == "csv":
        return Kernel.from_csv(_resolve(base_dir, sec["csv"]), p, d)
    raise ValueError(f"unknown kernel family {fam!r}")


def kernel_label(sec: dict) -> str:
    if "label" in sec:
        return sec["label"]
    if "name" in sec:
        return sec["name"]
    keys = sorted(k for k in sec if k not in ("family", "__line__", "strategy"))
    return sec.get("family", "kernel") + "".join(f"-{k}{sec[k]}" for k in keys)


def parse_spec(text: str) -> dict:
    """'family key=value ...' as used on the command line."""
    parts = text.split()
    if not parts:
        raise ConfigError("empty kernel spec")
    sec = {"__line__": None}
    head = parts[0]
    if head in GOLDEN_KERNELS:
        sec["name"] = head
    else:
        sec["family"] = head
    for item in parts[1:]:
        if "=" not in item:
            raise ConfigError(f"expected key=value in spec, got {item!r}")
        k, v = item.split("=", 1)
        sec[k] = v
    return sec


# suites ------------------------------------------------------------------------


def _fail_report(rid: str, exc: Exception, params: dict) -> InequalityReport:
    return InequalityReport(rid, math.nan, math.nan, math.nan, params=params,
                            notes=f"{type(exc).__name__}: {exc}", passed=False)


def _override_tol(rep: InequalityReport, tol: float | None) -> InequalityReport:
    if tol is not None:
        rep.tolerance = max(rep.tolerance, tol)
        rep.passed = bool(rep.margin >= -rep.tolerance)
    return rep


def _job_gns(job):
    ksec, fsecs, ts, mode, res, p, d, base, tol = job
    kern = build_kernel(ksec, p, d, base)
    label = kernel_label(ksec)
    out = []
    try:
        setup = gns_setup(kern, mode, ksec.get("strategy"))
    except (HypothesisError, KappaError, NonInvertibleError, SaturationError, NotLevyError) as exc:
        return [_fail_report("gns", exc, {"kernel": label})], None
    for fsec in fsecs:
        u = build_function(fsec, res, base)
        sn = nonlocal_seminorm(u, kern)
        for t in ts:
            rep = verify_gns(u, kern, t, mode, setup=setup, seminorm=sn)
            rep.params["kernel"] = label
            out.append(_override_tol(rep, tol))
    curve = np.column_stack([setup.phi.t, setup.phi(setup.phi.t)])
    return out, (label, curve, setup.w)


def _job_fractional(job):
    s, fsecs, dil, res, p, base, tol = job
    out = []
    for fsec in fsecs:
        u = build_function(fsec, res, base)
        for lam in dil:
            rep = verify_fractional_gns(u.dilate(lam) if lam != 1 else u, s, p)
            rep.params["dilation"] = lam
            out.append(_override_tol(rep, tol))
    return out


def _job_poincare(job):
    kind, ksec, fsecs, omega, res, p, d, base, tol = job
    kern = build_kernel(ksec, p, d, base)
    om = SetSpec.interval(*omega)
    out = []
    for fsec in fsecs:
        u = build_function(fsec, res, base)
        try:
            rep = (verify_poincare if kind == "poincare" else verify_friedrichs)(u, om, kern)
        except (HypothesisError, KappaError) as exc:
            rep = _fail_report(kind, exc, {"function": u.label})
        rep.params["kernel"] = kernel_label(ksec)
        out.append(_override_tol(rep, tol))
    return out


def _job_lemmas(job):
    ksec, fsecs, ts, mode, res, p, d, depth, base, tol = job
    kern = build_kernel(ksec, p, d, base)
    label = kernel_label(ksec)
    try:
        setup = gns_setup(kern, mode, ksec.get("strategy"))
    except (HypothesisError, KappaError, NonInvertibleError, SaturationError, NotLevyError) as exc:
        return [_fail_report("lemmas", exc, {"kernel": label})]
    out = []
    q = None
    if kern.kind == "fractional":
        q = FractionalParams(kern.params["s"], p, d).p_star / p
    for fsec in fsecs:
        u = abs(build_function(fsec, res, base))
        sn = nonlocal_seminorm(u, kern)
        lux = luxemburg_norm(u, setup.phi_norm)
        for t in ts:
            dec = dyadic_decompose(u, t, depth)
            params = {"function": u.label, "kernel": label, "t": t, "strategy": setup.strategy}
            lo = proof_lower_bound(dec, setup.w, setup.kappa, p)
            out.append(_override_tol(InequalityReport(
                "proof-lower", lo, sn.value, 1.0,
                max(1e-6 * sn.value, 2.0 * sn.error_estimate), params), tol))
            up = orlicz_upper_bound(dec, setup.phi_norm, p)
            lp = lux.value ** p
            err = lp * ((1 + lux.error_estimate / lux.value) ** p - 1) if lux.value else 0.0
            out.append(_override_tol(InequalityReport(
                "proof-upper", lp, up, 1.0, max(1e-9 * up, 2.0 * err), params), tol))
            if setup.theta is not None:
                rep = lemma_gene_convex_check(dec.a[:-1], setup.phi_norm, p, setup.theta,
                                              t ** p, dec.k_min)
                out.append(_override_tol(InequalityReport(
                    "lemma-gene-convex", rep.lhs, rep.rhs, setup.theta,
                    1e-12 * abs(rep.rhs), params), tol))
            if q is not None:
                rep = lemma_young_discrete_check(dec.a[:-1], q, t ** p, dec.k_min)
                out.append(_override_tol(InequalityReport(
                    "lemma-young-discrete", rep.lhs, rep.rhs, q,
                    1e-12 * abs(rep.rhs), params), tol))
    return out


def _job_bbm(job):
    fsecs, p, s_list, res, base = job
    out = []
    for fsec in fsecs:
        u = build_function(fsec, res, base)
        if u.kind != "linear":
            continue
        rep = bbm_limit_check(u, p, s_list)
        out.append(InequalityReport(
            "bbm", rep.within, 0.10, rep.target, 0.0,
            {"function": u.label, "s": rep.s, "ratios": rep.ratios, "monotone": rep.monotone},
            passed=rep.passed))
    return out


def _job_inverse(job):
    q, c, p, d, tol = job
    return [_override_tol(verify_inverse_problem(q, c, p, d), tol)]


def _default_sections(cfg: ExperimentConfig):
    kernels = cfg.kernels or [{"name": k, "strategy": s, "__line__": None}
                              for k, (_, s) in GOLDEN_KERNELS.items()]
    functions = cfg.functions or [{"name": n, "__line__": None} for n in GOLDEN_FUNCTIONS]
    return kernels, functions


def _suite_jobs(cfg: ExperimentConfig, suite: str):
    kernels, functions = _default_sections(cfg)
    base, tol, res = cfg.base_dir, cfg.tolerance, cfg.resolution
    if suite == "gns":
        return _job_gns, [(k, functions, cfg.t, cfg.mode, res, cfg.p, cfg.d, base, tol)
                          for k in kernels]
    if suite == "fractional-gns":
        return _job_fractional, [(s, functions, cfg.dilations, res, cfg.p, base, tol)
                                 for s in cfg.s]
    if suite in ("poincare", "friedrichs"):
        fs = cfg.functions or [{"name": "ramp" if suite == "poincare" else "hat-unit",
                                "__line__": None}]
        ks = cfg.kernels or [{"family": "fractional", "s": "0.25", "__line__": None}]
        return _job_poincare, [(suite, k, fs, cfg.omega, res, cfg.p, cfg.d, base, tol)
                               for k in ks]
    if suite == "lemmas":
        return _job_lemmas, [(k, functions, cfg.t, cfg.mode, res, cfg.p, cfg.d, cfg.depth,
                              base, tol) for k in kernels]
    if suite == "bbm":
        fs = cfg.functions or [{"name": "hat", "__line__": None}]
        return _job_bbm, [(fs, cfg.p, cfg.s_list, res, base)]
    if suite == "inverse":
        inv = cfg.inverse or [{"q": "4", "c": "32"}]
        return _job_inverse, [(float(i["q"]), float(i["c"]), float(i.get("p", cfg.p)),
                               int(i.get("d", cfg.d)), tol) for i in inv]
    raise ConfigError(f"unknown suite {suite!r}")


def _map(fn, jobs, workers: int):
    if workers == 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as ex:
        return list(ex.map(fn, jobs))


def _write_curve(path: str, header: list, rows) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(header)
        for row in rows:
            wr.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])


def _safe(name: str) -> str:
    return "".join(c if c.isalnum() or c in "-_." else "_" for c in name)


def run(cfg: ExperimentConfig, log=print) -> int:
    """Execute the selected suites and write reports; returns the exit status."""
    validate(cfg)
    suites = [s for s in SUITES if s != "all"] if cfg.suite == "all" else [cfg.suite]
    reports, curves = [], []
    for suite in suites:
        fn, jobs = _suite_jobs(cfg, suite)
        # refuse hypothesis violations before any work is spent
        if suite == "inverse":
            for q, _, p, d, _ in jobs:
                if not (1.0 / p - 1.0 / d < 1.0 / q < 1.0 / p):
                    raise HypothesisError(f"inverse problem needs 1/p - 1/d < 1/q < 1/p (q={q:g})")
        for res in _map(fn, jobs, cfg.workers):
            if suite == "gns":
                res, curve = res
                if curve is not None:
                    curves.append(curve)
            for rep in res:
                rep.params["suite"] = suite
                reports.append(rep)
    out = cfg.out if os.path.isabs(cfg.out) else os.path.join(os.getcwd(), cfg.out)
    os.makedirs(os.path.join(out, "curves"), exist_ok=True)
    write_jsonl(reports, os.path.join(out, "reports.jsonl"))
    write_summary_csv(reports, os.path.join(out, "summary.csv"))
    for label, phi_curve, w in curves:
        _write_curve(os.path.join(out, "curves", f"phi_{_safe(label)}.csv"), ["t", "phi"], phi_curve)
        r = w.r
        _write_curve(os.path.join(out, "curves", f"w_{_safe(label)}.csv"), ["r", "w"],
                     np.column_stack([r, w(r)]))
    by_suite: dict[str, list] = {}
    for rep in reports:
        by_suite.setdefault(rep.params["suite"], []).append(rep)
    for suite, reps in by_suite.items():
        rows = [(i, rep.id, rep.params.get("function", ""), rep.params.get("kernel", ""),
                 rep.params.get("t", ""), float(rep.margin)) for i, rep in enumerate(reps)]
        _write_curve(os.path.join(out, "curves", f"margins_{suite}.csv"),
                     ["index", "id", "function", "kernel", "t", "margin"], rows)
    failed = [r for r in reports if not r.passed]
    log(f"{len(reports)} reports, {len(failed)} failed; written to {out}")
    for r in failed:
        log(f"FAIL {r.id} {r.params.get('function', '')} {r.params.get('kernel', '')} "
            f"lhs={r.lhs!r} rhs={r.rhs!r} {r.notes}")
    return EXIT_FAIL if failed else EXIT_OK


# describe ------------------------------------------------------------------------


def describe_kernel(kern: Kernel, mode: str = "a") -> list[str]:
    lines = [f"kernel: {json.dumps(kern.describe(), sort_keys=True, default=str)}"]
    lm = levy_modular(kern)
    if not lm.is_levy:
        lines.append(f"p-Levy: no ({lm.reason})")
        return lines
    lines.append(f"p-Levy: yes (modular {lm.value:.6g})")
    try:
        kappa = almost_decreasing_kappa(kern)
        lines.append(f"kappa: {kappa:.6g}")
    except KappaError as exc:
        lines.append(f"kappa: fails near {exc.witness}")
    try:
        w = w_profile(kern, "tail" if mode == "a" else "sharp")
        phi = critical_young(w)
    except SaturationError as exc:
        if exc.bound is not None:
            lines.append(f"w is bounded by {exc.bound:.6g}; phi undefined below t = "
                         f"{1 / exc.bound:.6g}")
        else:
            lines.append(f"w saturates; phi undefined beyond r* = {exc.radius:.6g}")
        return lines
    except NonInvertibleError as exc:
        lines.append(f"phi undefined: {exc}")
        return lines
    t = phi.t
    q, c = fit_power(phi, t)
    lines.append(f"phi fit: {c:.6g} t^{q:.6g}")
    lines.append(f"phi endpoints: phi({t[0]:.3g}) = {float(phi(t[0])):.6g}, "
                 f"phi({t[-1]:.3g}) = {float(phi(t[-1])):.6g}")
    conv = check_convexity_phi_p(phi, kern.p)
    lines.append("phi(t^(1/p)) convex: " + ("yes" if conv.passed else f"no, near {conv.witness}"))
    g = growth_theta(phi)
    if g.passed:
        lines.append(f"theta: {g.theta:.6g}")
    else:
        hint = ("; use per-component verification (strategy = per-component)"
                if kern.kind == "max-fractional" else "")
        lines.append(f"growth condition fails near {g.witness}{hint}")
    if not conv.passed:
        lines.append("phi is not convex in t^p; norms use its minorant (strategy = minorant)")
    rates = asymptotic_rates(phi, kern)
    lines.append(f"N-function (phi_p): {rates.n_function}; integrable kernel: {rates.integrable}")
    lines.append(f"phi(t)/t^p at grid ends: {rates.ratio_small:.6g}, {rates.ratio_large:.6g}")
    for row in rates.residual:
        lines.append(f"residual at r = {row['radius']:g}: {row['lhs']:.6g} vs {row['rhs']:.6g}")
    return lines


# entry point -----------------------------------------------------------------------


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="levy-orlicz",
                                 description="Critical Young functions, Orlicz norms and "
                                             "nonlocal Sobolev inequalities.")
    sub = ap.add_subparsers(dest="command", required=True)
    pr = sub.add_parser("run", help="run verification suites from a config file")
    pr.add_argument("--config", required=True)
    pr.add_argument("--out")
    pr.add_argument("--suite", choices=SUITES)
    pr.add_argument("--mode", choices=("a", "mr2"))
    pr.add_argument("--resolution", type=int)
    pr.add_argument("--tolerance", type=float)
    pr.add_argument("--workers", type=int)

    pd = sub.add_parser("describe", help="summarise a kernel")
    pd.add_argument("spec", nargs="*", help="'family key=value ...' or a corpus kernel name")
    pd.add_argument("--config")
    pd.add_argument("--mode", choices=("a", "mr2"), default="a")

    for name, helptext in (("norm", "Luxemburg norm in the critical function of a kernel"),
                           ("seminorm", "nonlocal seminorm of a function")):
        pn = sub.add_parser(name, help=helptext)
        pn.add_argument("function", help="corpus name or CSV path")
        pn.add_argument("--kernel", required=True, help="'family key=value ...'")
        pn.add_argument("--resolution", type=int, default=1024)
        pn.add_argument("--mode", choices=("a", "mr2"), default="a")

    pc = sub.add_parser("critical", help="critical Young function of a kernel")
    pc.add_argument("--kernel", required=True)
    pc.add_argument("--mode", choices=("a", "mr2"), default="a")
    pc.add_argument("--out", help="write the phi curve to this CSV")
    pc.add_argument("--explore", action="store_true",
                    help="compare the constant with empirical ratios on the corpus")
    pc.add_argument("--resolution", type=int, default=1024)
    return ap


def _function_arg(text: str, resolution: int) -> GridFunction:
    if text in FUNCTION_NAMES:
        return build_function({"name": text}, resolution)
    if not os.path.isfile(text):
        raise ConfigError(f"unknown function {text!r}")
    return build_function({"csv": text}, resolution)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "run":
            cfg = load_config(args.config)
            for key in ("out", "suite", "mode", "resolution", "tolerance", "workers"):
                val = getattr(args, key)
                if val is not None:
                    setattr(cfg, key, val)
            return run(cfg)
        if args.command == "describe":
            secs = []
            if args.config:
                secs = load_config(args.config).kernels
            if args.spec:
                secs.append(parse_spec(" ".join(args.spec)))
            if not secs:
                raise ConfigError("nothing to describe")
            for sec in secs:
                print("\n".join(describe_kernel(build_kernel(sec), args.mode)))
            return EXIT_OK
        kern = build_kernel(parse_spec(args.kernel))
        if args.command == "critical":
            return _critical(args, kern)
        u = _function_arg(args.function, args.resolution)
        if args.command == "seminorm":
            sn = nonlocal_seminorm(u, kern)
            print(f"seminorm^p = {sn.value!r} (error estimate {sn.error_estimate:.3g})")
        else:
            setup = gns_setup(kern, args.mode)
            nr = luxemburg_norm(u, setup.phi_norm)
            print(f"luxemburg norm = {nr.value!r} ({setup.phi_norm.label})")
        return EXIT_OK
    except (ConfigError, HypothesisError, KeyError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def _critical(args, kern: Kernel) -> int:
    setup = gns_setup(kern, args.mode)
    phi = setup.phi
    q, c = fit_power(phi, phi.t)
    print(f"phi fit: {c!r} t^{q!r}; strategy {setup.strategy}")
    if args.out:
        _write_curve(args.out, ["t", "phi"], np.column_stack([phi.t, phi(phi.t)]))
    if args.explore:
        # exploratory only: how far the constant sits above the corpus ratios
        C = setup.constant(2.0)
        for name in GOLDEN_FUNCTIONS:
            u = golden_function(name, args.resolution)
            ratio = (luxemburg_norm(u, setup.phi_norm).value
                     / nonlocal_seminorm(u, kern).value ** (1.0 / kern.p))
            print(f"{name}: ||u|| / |u|^(1/p) = {ratio:.6g}, constant at t=2 = {C:.6g}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
