"""End-to-end inequality checks with explicit constants."""
from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .fields import GridFunction, lebesgue_norm, nonlocal_seminorm
from .kernels import (
    Kernel,
    SetSpec,
    _sample_radii,
    almost_decreasing_kappa,
    gamma_s,
    kernel_from_young,
    nu_sharp,
    unit_ball_volume,
    w_profile,
)
from .levelset import c_p
from .orlicz import luxemburg_norm
from .young import (
    FractionalParams,
    YoungFunction,
    check_convexity_phi_p,
    combine,
    critical_young,
    growth_theta,
)

__all__ = [
    "InequalityReport",
    "HypothesisError",
    "GNSSetup",
    "theta_constant",
    "gns_setup",
    "verify_gns",
    "brezis_constant",
    "verify_fractional_gns",
    "verify_poincare",
    "verify_friedrichs",
    "verify_inverse_problem",
    "write_jsonl",
    "write_summary_csv",
]


class HypothesisError(ValueError):
    """Inputs violate the hypotheses of the inequality being checked."""


def _clean(x):
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else repr(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    return x


@dataclass
class InequalityReport:
    """One checked instance of lhs <= rhs; passes when rhs - lhs >= -tolerance."""

    id: str
    lhs: float
    rhs: float
    constant: float
    tolerance: float = 1e-6
    params: dict = field(default_factory=dict)
    notes: str = ""
    passed: bool | None = None

    def __post_init__(self):
        if self.passed is None:
            self.passed = bool(self.margin >= -self.tolerance)

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    def to_dict(self) -> dict:
        out = asdict(self)
        out["margin"] = self.margin
        return _clean(out)


def theta_constant(t: float, p: float, kappa: float, theta: float, phi: YoungFunction,
                   mode: str = "a") -> float:
    """Theta_t = t [2 kappa^2 C_p(t) phi(theta/t)]^{-1/p}; kappa = 1 in mode 'mr2'."""
    if t < 2:
        raise ValueError("t must be at least 2")
    if theta <= 0:
        raise ValueError("theta must be positive")
    if mode == "mr2":
        kappa = 1.0
    if not 0 < kappa <= 1:
        raise ValueError("kappa must lie in (0, 1]")
    val = float(phi(theta / t))
    if val <= 1e-300:
        raise ValueError("phi(theta/t) vanishes; the constant is infinite")
    return t * (2.0 * kappa ** 2 * c_p(t, p) * val) ** (-1.0 / p)


@dataclass(eq=False)
class GNSSetup:
    """Everything verify_gns needs about a kernel, computed once.

    ``strategy`` is ``direct`` (growth condition certified), ``per-component``
    (maximum of two fractional kernels, each handled separately) or
    ``minorant`` (non-convex critical function replaced by its minorant).
    """

    kernel: Kernel
    mode: str
    strategy: str
    w: object
    phi: YoungFunction
    phi_norm: YoungFunction
    kappa: float
    theta: float | None
    components: list = field(default_factory=list)
    c2: float = 1.0
    notes: str = ""

    def constant(self, t: float) -> float:
        p = self.kernel.p
        if self.strategy == "direct":
            return theta_constant(t, p, self.kappa, self.theta, self.phi, self.mode)
        if self.strategy == "per-component":
            worst = max(theta_constant(t, p, 1.0, th, ph, self.mode) for ph, th in self.components)
            return 2.0 * worst * self.c2 ** (1.0 / p)
        return 2.0 * theta_constant(t, p, self.kappa, self.theta, self.phi_norm, self.mode)

    def describe(self) -> dict:
        return {"strategy": self.strategy, "mode": self.mode, "kappa": self.kappa,
                "theta": self.theta, "c2": self.c2, **self.kernel.describe()}


def _component_bound(kernel: Kernel, comps: list[Kernel]) -> float:
    """sup over sampled radii of max_i nu_i / nu."""
    r = _sample_radii(kernel, 1024)
    v = kernel(r)
    top = np.max([c(r) for c in comps], axis=0)
    live = v > 0
    return float(np.max(top[live] / v[live]))


def gns_setup(kernel: Kernel, mode: str = "a", strategy: str | None = None) -> GNSSetup:
    """Critical function, kappa, theta and the strategy for ``kernel``."""
    if mode not in ("a", "mr2"):
        raise ValueError("mode must be 'a' or 'mr2'")
    w = w_profile(kernel, "tail" if mode == "a" else "sharp")
    phi = critical_young(w)
    kappa = almost_decreasing_kappa(kernel) if mode == "a" else 1.0
    convex = check_convexity_phi_p(phi, kernel.p)
    if strategy is None:
        if not convex.passed:
            strategy = "minorant"
        else:
            g = growth_theta(phi)
            strategy = "direct" if g.passed else "per-component"
    if strategy == "direct":
        g = growth_theta(phi)
        if not g.passed:
            raise HypothesisError(f"growth condition fails near {g.witness}")
        return GNSSetup(kernel, mode, strategy, w, phi, phi, kappa, g.theta)
    if strategy == "per-component":
        if kernel.kind != "max-fractional":
            raise HypothesisError("per-component mode needs a max-fractional kernel")
        pr = kernel.params
        p, d = kernel.p, kernel.d
        comps, pairs = [], []
        for s in (pr["s1"], pr["s2"]):
            ki = Kernel.fractional(s, p, d, scale=1.0 / gamma_s(s, p, d))
            fp = FractionalParams(s, p, d)
            ph = YoungFunction.power(1.0, fp.p_star, p, label=f"t^{fp.p_star:g}")
            comps.append(ki)
            pairs.append((ph, 1.0))
        c2 = _component_bound(kernel, comps)
        return GNSSetup(kernel, mode, strategy, w, phi, phi, 1.0, None, pairs, c2,
                        "growth condition fails for the maximum; components verified separately")
    if strategy == "minorant":
        phi_min = combine(phi, phi, "minorant")
        g = growth_theta(phi_min)
        if not g.passed:
            raise HypothesisError(f"growth condition fails for the minorant near {g.witness}")
        return GNSSetup(kernel, mode, strategy, w, phi, phi_min, kappa, g.theta,
                        notes="critical function not convex in t^p; norm taken in its minorant")
    raise ValueError(f"unknown strategy {strategy!r}")


def _root_tol(C: float, value: float, err: float, p: float) -> float:
    """Change of C * value^{1/p} caused by an error ``err`` in value."""
    return C * ((value + err) ** (1.0 / p) - max(value, 0.0) ** (1.0 / p))


def verify_gns(u: GridFunction, kernel: Kernel, t: float = 2.0, mode: str = "a",
               setup: GNSSetup | None = None, seminorm=None) -> InequalityReport:
    """||u||_phi <= C (seminorm)^{1/p} with C from the setup's strategy."""
    if t < 2:
        raise ValueError("t must be at least 2")
    setup = gns_setup(kernel, mode) if setup is None else setup
    p = kernel.p
    params = {"function": u.label, "t": t, **setup.describe()}
    if not np.any(u.values):
        return InequalityReport("gns", 0.0, 0.0, setup.constant(t), params=params,
                                notes="zero function")
    C = setup.constant(t)
    lux = luxemburg_norm(u, setup.phi_norm)
    sn = nonlocal_seminorm(u, kernel) if seminorm is None else seminorm
    rhs = C * sn.value ** (1.0 / p)
    tol = max(1e-6, 2.0 * _root_tol(C, sn.value, sn.error_estimate, p) + lux.error_estimate)
    return InequalityReport("gns", lux.value, rhs, C, tol, params, setup.notes)


def brezis_constant(s: float, p: float, d: int) -> float:
    """2^{p*/p} |B(0,1)|^{-1/p - s/d}."""
    fp = FractionalParams(s, p, d)
    return 2.0 ** (fp.p_star / p) * unit_ball_volume(d) ** (-1.0 / p - s / d)


def verify_fractional_gns(u: GridFunction, s: float, p: float = 2.0) -> InequalityReport:
    """||u||_{p*} <= 2^{p*/p} |B(0,1)|^{-1/p-s/d} (fractional seminorm)^{1/p}."""
    d = u.dimension
    if 1.0 / p - s / d <= 0:
        raise HypothesisError("need 1/p - s/d > 0")
    fp = FractionalParams(s, p, d)
    C = brezis_constant(s, p, d)
    params = {"function": u.label, "s": s, "p": p, "d": d, "p_star": fp.p_star}
    lhs = lebesgue_norm(u, fp.p_star)
    sn = nonlocal_seminorm(u, Kernel.fractional(s, p, d))
    rhs = C * sn.value ** (1.0 / p)
    tol = max(1e-6, 2.0 * _root_tol(C, sn.value, sn.error_estimate, p))
    return InequalityReport("fractional-gns", lhs, rhs, C, tol, params)


def verify_poincare(u: GridFunction, omega: SetSpec, kernel: Kernel) -> InequalityReport:
    """||u - mean||_{L^p(Omega)} <= [kappa |Omega| nu(R)]^{-1/p} (Omega x Omega seminorm)^{1/p}."""
    p = kernel.p
    kappa = almost_decreasing_kappa(kernel)
    R = omega.diameter
    nuR = float(kernel(R))
    if nuR <= 0:
        raise HypothesisError("nu vanishes at the diameter; the constant is infinite")
    C = (kappa * omega.measure * nuR) ** (-1.0 / p)
    centred = u.with_values(u.values - u.mean(omega))
    lhs = lebesgue_norm(centred, p, omega)
    sn = nonlocal_seminorm(u, kernel, domain=omega)
    rhs = C * sn.value ** (1.0 / p)
    tol = max(1e-6, 2.0 * _root_tol(C, sn.value, sn.error_estimate, p))
    params = {"function": u.label, "omega_measure": omega.measure, "diameter": R,
              "kappa": kappa, **kernel.describe()}
    return InequalityReport("poincare", lhs, rhs, C, tol, params)


def verify_friedrichs(u: GridFunction, omega: SetSpec, kernel: Kernel) -> InequalityReport:
    """||u||_{L^p(Omega)} <= [2 nu^#(|Omega|)]^{-1/p} (full seminorm)^{1/p} for u = 0 off Omega."""
    p = kernel.p
    if u.dimension != 1:
        raise NotImplementedError("Friedrichs check is implemented in 1-d")
    v = u.values
    live = v != 0 if u.kind == "constant" else (v[:-1] != 0) | (v[1:] != 0)
    if np.any(live & ~u._cell_mask(omega)):
        raise HypothesisError("u must vanish outside Omega")
    ns = float(nu_sharp(kernel, omega.measure))
    if ns <= 0:
        raise HypothesisError("nu^# vanishes; the constant is infinite")
    C = (2.0 * ns) ** (-1.0 / p)
    lhs = lebesgue_norm(u, p)
    sn = nonlocal_seminorm(u, kernel)
    rhs = C * sn.value ** (1.0 / p)
    tol = max(1e-6, 2.0 * _root_tol(C, sn.value, sn.error_estimate, p))
    params = {"function": u.label, "omega_measure": omega.measure, "nu_sharp": ns,
              **kernel.describe()}
    return InequalityReport("friedrichs", lhs, rhs, C, tol, params)


def _fit_middle(kernel: Kernel, decades: float = 2.0):
    rho = kernel.breaks[1:-1]
    lo, hi = np.log10(rho[0]), np.log10(rho[-1])
    mid = 0.5 * (lo + hi)
    sel = (np.log10(rho) >= mid - decades / 2) & (np.log10(rho) <= mid + decades / 2)
    r = rho[sel]
    slope, lc = np.polyfit(np.log(r), np.log(kernel(r)), 1)
    return float(slope), float(math.exp(lc)), r


def verify_inverse_problem(q: float, c: float, p: float = 2.0, d: int = 1,
                           n: int = 1024) -> InequalityReport:
    """Recover nu from phi = c t^q and compare with C_{p,q,d} |h|^{-d-sp}.

    lhs is the largest of the exponent error / 1e-4, the relative coefficient
    error / 1e-3 and the round-trip error of phi / 1e-3 on t in [0.1, 10], so
    the report passes when lhs <= rhs = 1.
    """
    if not (1.0 / p - 1.0 / d < 1.0 / q < 1.0 / p):
        raise HypothesisError("need 1/p - 1/d < 1/q < 1/p")
    s = d / p - d / q
    phi = YoungFunction.power(c, q, p)
    kern = kernel_from_young(phi, p, d, n)
    slope, coef, r = _fit_middle(kern)
    cd = unit_ball_volume(d)
    want_exp = -d - s * p
    want_coef = c ** (p / q) * (1 - p / q) * cd ** (p / q - 2)
    e_exp = abs(slope - want_exp)
    e_coef = abs(coef / want_coef - 1)
    back = critical_young(w_profile(kern))
    tt = phi.t[(phi.t >= 0.1) & (phi.t <= 10.0)]
    round_trip = float(np.max(np.abs(back(tt) / phi(tt) - 1)))
    lhs = max(e_exp / 1e-4, e_coef / 1e-3, round_trip / 1e-3)
    params = {"q": q, "c": c, "p": p, "d": d, "s": s, "exponent": slope,
              "expected_exponent": want_exp, "coefficient": coef,
              "expected_coefficient": want_coef, "round_trip_error": round_trip}
    return InequalityReport("inverse", lhs, 1.0, want_coef, 0.0, params)


def write_jsonl(reports, path) -> None:
    with open(path, "w") as fh:
        for r in reports:
            fh.write(json.dumps(r.to_dict(), sort_keys=True) + "\n")


def write_summary_csv(reports, path) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["id", "lhs", "rhs", "margin", "pass"])
        for r in reports:
            wr.writerow([r.id, repr(float(r.lhs)), repr(float(r.rhs)), repr(float(r.margin)),
                         int(bool(r.passed))])
