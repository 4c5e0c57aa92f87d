"""Acceptance suite: one PASS/FAIL line per criterion, with wall time."""
import math
import time

import numpy as np
import pytest

from levy_orlicz import (
    GridFunction,
    GridKernel,
    Kernel,
    SetSpec,
    YoungFunction,
    bbm_limit_check,
    brezis_constant,
    critical_young,
    dyadic_decompose,
    fit_power,
    gamma_s,
    golden_function,
    golden_functions,
    golden_kernels,
    indicator_norm,
    lebesgue_norm,
    lemma_gene_convex_check,
    lemma_young_discrete_check,
    luxemburg_norm,
    nonlocal_seminorm,
    nu_sharp,
    orlicz_upper_bound,
    proof_lower_bound,
    random_function,
    random_tabulated_kernel,
    rearrange_function,
    rearrange_kernel,
    verify_fractional_gns,
    verify_friedrichs,
    verify_gns,
    verify_inverse_problem,
    verify_poincare,
    w_profile,
)
from levy_orlicz.cli import build_function
from levy_orlicz.kernels import _distribution
from levy_orlicz.verify import gns_setup

RES = 2 ** 10


@pytest.fixture
def report(capsys):
    """Prints the criterion line outside pytest's capture, then asserts."""
    def emit(n, ok, detail, elapsed, limit):
        ok = bool(ok) and elapsed < limit
        with capsys.disabled():
            print(f"\ncriterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}  "
                  f"[{elapsed:.2f}s < {limit:g}s]")
        assert ok, detail
    return emit


def test_criterion_01_critical_function(report):
    t0 = time.perf_counter()
    phi = critical_young(w_profile(Kernel.fractional(0.25, 2, 1)))
    q, c = fit_power(phi)
    dt = time.perf_counter() - t0
    ok = abs(q - 4.0) <= 1e-3 and abs(c - 32.0) <= 0.1
    report(1, ok, f"exponent {q:.6f}, coefficient {c:.5f}", dt, 1.0)


def test_criterion_02_nu_sharp(report):
    t0 = time.perf_counter()
    errs = []
    for s in (0.125, 0.25, 0.4):
        k = Kernel.fractional(s, 2, 1)
        for m in (0.5, 1.0, 2.0, 8.0):
            want = gamma_s(s, 2, 1) * m ** (-s * 2)
            errs.append(abs(nu_sharp(k, m) / want - 1))
    fixture = nu_sharp(Kernel.fractional(0.25, 2, 1), 2.0)
    dt = time.perf_counter() - t0
    ok = max(errs) <= 1e-6 and abs(fixture - 4.0) <= 4e-6
    report(2, ok, f"max rel error {max(errs):.2e}, nu#(2) = {fixture:.9f}", dt, 1.0)


def test_criterion_03_indicator_norm(report):
    pairs = [
        (YoungFunction.power(32.0, 4.0, 2.0), 0.5),
        (YoungFunction.power(32.0, 4.0, 2.0), 2.0),
        (YoungFunction.power(1.0, 2.0, 2.0), 3.0),
        (YoungFunction.power(0.5, 3.0, 2.0), 0.25),
        (YoungFunction.power(7.0, 6.0, 2.0), 1.0),
        (YoungFunction.power(2.0, 2.5, 2.0), 10.0),
        (YoungFunction.log_family(1.0, 2.0), 1.0),
        (YoungFunction.log_family(2.0, 2.0), 0.1),
        (critical_young(w_profile(Kernel.fractional(0.125, 2, 1))), 4.0),
        (critical_young(w_profile(Kernel.piecewise_fractional(0.25, 0.125, 1.0))), 1.5),
    ]
    t0 = time.perf_counter()
    errs = []
    for phi, m in pairs:
        h = m / 64
        u = np.ones(64)
        g = GridFunction(np.concatenate([[0.0], u, [0.0]]), h, (-h,), "constant")
        got = luxemburg_norm(g, phi).value
        want = 1.0 / float(phi.inverse(1.0 / m))
        errs.append(abs(got / want - 1))
        errs.append(abs(indicator_norm(phi, m) / want - 1))
    dt = time.perf_counter() - t0
    report(3, max(errs) <= 1e-6, f"{len(pairs)} pairs, max rel error {max(errs):.2e}", dt, 1.0)


def test_criterion_04_bbm(report):
    t0 = time.perf_counter()
    rep = bbm_limit_check(golden_function("hat", RES), 2.0, (0.90, 0.95, 0.99))
    dt = time.perf_counter() - t0
    at99 = rep.seminorms[-1]
    ok = abs(at99 - 2.0) <= 0.2 and rep.monotone and rep.target == pytest.approx(2.0)
    ratios = ", ".join(f"{r:.4f}" for r in rep.ratios)
    report(4, ok, f"s=0.99 value {at99:.4f} (target 2), ratios {ratios}", dt, 30.0)


def test_criterion_05_gns_corpus(report):
    t0 = time.perf_counter()
    funcs = golden_functions(RES)
    n, worst, failed = 0, math.inf, []
    for kname, (kern, strategy) in golden_kernels(2.0, 1).items():
        setup = gns_setup(kern, "a", strategy)
        for fname, u in funcs.items():
            for t in (2.0, 3.0):
                rep = verify_gns(u, kern, t, "a", setup=setup)
                n += 1
                worst = min(worst, rep.margin / rep.rhs)
                if not rep.passed:
                    failed.append(f"{kname}/{fname}/t={t}")
    dt = time.perf_counter() - t0
    report(5, not failed and n == 32,
           f"{n - len(failed)}/{n} pass, smallest relative margin {worst:.3f}", dt, 300.0)


def test_criterion_06_fractional_gns_dilation(report):
    t0 = time.perf_counter()
    funcs = golden_functions(RES)
    n, failed, drift = 0, [], 0.0
    for s in (0.125, 0.25):
        for fname, u in funcs.items():
            rel = {}
            for lam in (0.5, 1.0, 2.0):
                rep = verify_fractional_gns(u.dilate(lam) if lam != 1 else u, s, 2.0)
                n += 1
                if not rep.passed:
                    failed.append(f"{fname}/s={s}/lam={lam}")
                rel[lam] = rep.margin / rep.rhs
            for lam in (0.5, 2.0):
                drift = max(drift, abs(rel[lam] - rel[1.0]) / abs(rel[1.0]))
    C = brezis_constant(0.25, 2, 1)
    dt = time.perf_counter() - t0
    ok = not failed and drift <= 0.01 and abs(C - 2 ** 1.25) <= 1e-12
    report(6, ok, f"{n - len(failed)}/{n} pass, constant(1/4) {C:.6f}, "
                  f"margin drift {drift:.2e}", dt, 120.0)


def test_criterion_07_poincare_friedrichs(report):
    t0 = time.perf_counter()
    k = Kernel.fractional(0.25, 2, 1)
    om = SetSpec.interval(0.0, 1.0)
    pc = verify_poincare(build_function({"name": "ramp"}, RES), om, k)
    fr = verify_friedrichs(build_function({"name": "hat-unit"}, RES), om, k)
    dt = time.perf_counter() - t0
    ok = (pc.passed and fr.passed and abs(pc.constant - 1.0) <= 1e-9
          and abs(fr.constant - 0.29730) <= 5e-6 and abs(pc.lhs ** 2 - 1 / 12) <= 1e-4)
    report(7, ok, f"Poincare C {pc.constant:.6f}, Friedrichs C {fr.constant:.6f}, "
                  f"lhs^2 {pc.lhs ** 2:.8f}", dt, 60.0)


def test_criterion_08_inverse_problem(report):
    t0 = time.perf_counter()
    rep = verify_inverse_problem(4.0, 32.0, 2.0, 1)
    dt = time.perf_counter() - t0
    e, c, rt = (rep.params[k] for k in ("exponent", "coefficient", "round_trip_error"))
    ok = rep.passed and abs(e + 1.5) <= 1e-4 and abs(c - 1.0) <= 1e-3 and rt <= 1e-3
    report(8, ok, f"exponent {e:.6f}, coefficient {c:.6f}, round trip {rt:.2e}", dt, 5.0)


def _random_sequence(rng):
    n = int(rng.integers(1, 30))
    a = np.sort(rng.uniform(0, 1e3, n))[::-1]
    zeros = int(rng.integers(0, 4))
    return np.concatenate([a, np.zeros(zeros)])


def test_criterion_09_proof_chain(report):
    t0 = time.perf_counter()
    failed, n = [], 0
    funcs = golden_functions(RES)
    for kname, (kern, strategy) in golden_kernels(2.0, 1).items():
        setup = gns_setup(kern, "a", strategy)
        for fname, u in funcs.items():
            u = abs(u)
            sn = nonlocal_seminorm(u, kern)
            lux = luxemburg_norm(u, setup.phi_norm)
            for t in (2.0, 3.0):
                dec = dyadic_decompose(u, t)
                lo = proof_lower_bound(dec, setup.w, setup.kappa, 2.0)
                up = orlicz_upper_bound(dec, setup.phi_norm, 2.0)
                lp = lux.value ** 2
                err = lp * ((1 + lux.error_estimate / lux.value) ** 2 - 1)
                n += 2
                if lo > sn.value + max(1e-6 * sn.value, 2 * sn.error_estimate):
                    failed.append(f"lower {kname}/{fname}/t={t}")
                if lp > up + max(1e-9 * up, 2 * err):
                    failed.append(f"upper {kname}/{fname}/t={t}")
    rng = np.random.default_rng(20240601)
    phi = YoungFunction.power(32.0, 4.0, 2.0)
    theta = 2 ** -1.25
    worst_eq = 0.0
    for _ in range(100):
        a = _random_sequence(rng)
        k0 = int(rng.integers(-20, 6))
        t = float(rng.uniform(2.0, 4.0))
        q = float(rng.uniform(1.0, 6.0))
        gc = lemma_gene_convex_check(a, phi, 2.0, theta, t ** 2, k0)
        yd = lemma_young_discrete_check(a, q, t ** 2, k0)
        eq = lemma_young_discrete_check(a, 1.0, t, k0)
        n += 3
        if not gc.passed:
            failed.append("gene-convex")
        if not yd.passed:
            failed.append("young-discrete")
        if eq.rhs > 0:
            worst_eq = max(worst_eq, abs(eq.lhs / eq.rhs - 1))
    if worst_eq > 1e-12:
        failed.append("q=1 equality")
    dt = time.perf_counter() - t0
    report(9, not failed, f"{n - len(failed)}/{n} checks pass, q=1 equality gap {worst_eq:.1e}",
           dt, 120.0)


def _kernel_lq(kern, q):
    # piecewise-constant radial profile: sum of c^q |annulus|
    cd = math.pi ** (kern.d / 2) / math.gamma(kern.d / 2 + 1)
    total = 0.0
    for lo, hi, c in zip(kern.breaks[:-1], kern.breaks[1:], kern.coefs):
        if c > 0:
            total += c ** q * cd * (hi ** kern.d - lo ** kern.d)
    return total


def test_criterion_10_rearrangement(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    failed, worst_cells = [], 0.0
    setups = [(1, "linear"), (1, "constant"), (2, "constant")]
    for i in range(10):
        d, kind = setups[i % 3]
        u = random_function(rng, 128 if d == 1 else 32, kind, d=d)
        r = rearrange_function(u)
        cell = u.spacing ** d
        top = float(np.abs(u.values).max())
        for s in np.linspace(0, top, 22)[1:-1]:
            gap = abs(r.level_measure(s) - u.level_measure(s)) / cell
            worst_cells = max(worst_cells, gap)
        for q in (1, 2, 4):
            if abs(lebesgue_norm(r, q) ** q - lebesgue_norm(u, q) ** q) > u.spacing * top ** q:
                failed.append(f"function {i} L^{q}")
    for i in range(5):
        d = 1 + i % 2
        kern = random_tabulated_kernel(rng, 2.0, d)
        n, h = (65, 0.05) if d == 1 else (33, 0.1)
        g = GridKernel(np.zeros((n,) * d), h, 2.0)
        rad = g.radii()
        vals = kern(np.maximum(rad, h / 2))
        vals = rng.permutation(vals.ravel()).reshape(vals.shape)
        g = GridKernel(vals, h, 2.0)
        rk = rearrange_kernel(g)
        cell = h ** d
        for s in np.quantile(vals, np.linspace(0.02, 0.98, 20)):
            gap = abs(np.asarray(_distribution(rk, s)).item() - g.level_measure(s)) / cell
            worst_cells = max(worst_cells, gap)
        for q in (1, 2, 4):
            want = float(np.sum(vals ** q)) * cell
            if abs(_kernel_lq(rk, q) / want - 1) > 1e-9:
                failed.append(f"kernel {i} L^{q}")
    if worst_cells > 1.0:
        failed.append("level sets")
    dt = time.perf_counter() - t0
    report(10, not failed, f"15 objects, worst level gap {worst_cells:.3f} cells, "
                           f"{len(failed)} L^q failures", dt, 60.0)
