"""Young functions: the critical function of a kernel, inversion, conjugation,
max/min combinations and the growth constant theta."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .kernels import Kernel, TailProfile, levy_modular, nu_sharp, unit_ball_volume, gamma_s

__all__ = [
    "YoungFunction",
    "FractionalParams",
    "ConvexityResult",
    "GrowthResult",
    "AsymptoticReport",
    "NonInvertibleError",
    "default_grid",
    "critical_young",
    "check_convexity_phi_p",
    "growth_theta",
    "conjugate",
    "combine",
    "asymptotic_rates",
    "fit_power",
]


class NonInvertibleError(ValueError):
    """The sampled curve is not strictly increasing."""


def default_grid(n: int = 256, decades: float = 6.0) -> np.ndarray:
    """``n`` log-spaced points spanning ``decades`` decades centred at t = 1."""
    return np.logspace(-decades / 2, decades / 2, n)


def _loglog(x, xs, ys, e0, einf):
    """Log-log linear interpolation with power-law extrapolation; 0 at x = 0."""
    x = np.asarray(x, float)
    lx, ly = np.log(xs), np.log(ys)
    with np.errstate(divide="ignore"):
        u = np.log(np.where(x > 0, x, 1.0))
    out = np.interp(u, lx, ly)
    out = np.where(u < lx[0], ly[0] + e0 * (u - lx[0]), out)
    out = np.where(u > lx[-1], ly[-1] + einf * (u - lx[-1]), out)
    with np.errstate(over="ignore"):
        return np.where(x > 0, np.exp(out), 0.0)


class YoungFunction:
    """Sampled Young function t -> phi(t) with power-law ends.

    Parameters
    ----------
    nodes_t, nodes_v : interpolation nodes, strictly increasing and positive.
    exp0, exp_inf : exponents used below and above the nodes.
    p : exponent the function is paired with (critical for p when set).
    fn, inv : optional exact evaluation of phi and its inverse.
    grid : sample grid used by the discrete checks; defaults to 256 log points
        over six decades plus any knots inside that range.
    flags : markers such as ``possibly-nonconvex``.
    """

    def __init__(self, nodes_t, nodes_v, exp0=None, exp_inf=None, p=None,
                 fn: Callable | None = None, inv: Callable | None = None,
                 grid=None, label: str = "phi", flags=(), knots=()):
        t = np.asarray(nodes_t, float)
        v = np.asarray(nodes_v, float)
        if t.ndim != 1 or t.size < 2 or t.size != v.size:
            raise ValueError("need matching 1-d node arrays")
        if np.any(t <= 0) or np.any(np.diff(t) <= 0):
            raise ValueError("nodes must be positive and increasing")
        if np.any(v <= 0) or np.any(np.diff(v) <= 0) or not np.all(np.isfinite(v)):
            bad = np.nonzero(np.diff(v) <= 0)[0]
            where = f" near t={t[bad[0]]:.6g}" if bad.size else ""
            raise NonInvertibleError(f"phi must be positive and strictly increasing{where}")
        lt, lv = np.log(t), np.log(v)
        self.nodes_t, self.nodes_v = t, v
        self.exp0 = float((lv[1] - lv[0]) / (lt[1] - lt[0])) if exp0 is None else float(exp0)
        self.exp_inf = float((lv[-1] - lv[-2]) / (lt[-1] - lt[-2])) if exp_inf is None else float(exp_inf)
        self.p = p
        self.fn, self.inv = fn, inv
        self.label = label
        self.flags = frozenset(flags)
        self.knots = tuple(float(k) for k in knots)
        g = default_grid() if grid is None else np.asarray(grid, float)
        k = np.asarray(self.knots, float)
        k = k[(k > g[0]) & (k < g[-1])]
        self.t = np.unique(np.concatenate([g, k]))

    # closed forms -------------------------------------------------------

    @classmethod
    def power(cls, c: float, q: float, p: float | None = None, label: str | None = None,
              grid=None) -> YoungFunction:
        """c * t^q."""
        if c <= 0 or q < 1:
            raise ValueError("need c > 0 and q >= 1")
        g = default_grid() if grid is None else np.asarray(grid, float)
        fn = lambda x: c * np.asarray(x, float) ** q  # noqa: E731
        inv = lambda y: (np.asarray(y, float) / c) ** (1.0 / q)  # noqa: E731
        return cls(g, fn(g), q, q, p, fn, inv, grid=g, label=label or f"{c:g}*t^{q:g}")

    @classmethod
    def log_family(cls, a: float, p: float = 2.0, grid=None) -> YoungFunction:
        """ln(a + e^{t^p}) - ln(a + 1)."""
        la = math.log(a + 1)

        def fn(x):
            x = np.asarray(x, float) ** p
            # ln((a + e^x)/(a + 1)) written to avoid overflow and cancellation
            return np.where(x < 1.0, np.log1p(np.expm1(np.minimum(x, 1.0)) / (a + 1)),
                            x + np.log1p(a * np.exp(-np.minimum(x, 700.0))) - la)

        def inv(y):
            y = np.asarray(y, float)
            small = y < 1.0
            out = np.empty_like(y)
            out[small] = np.log1p((a + 1) * np.expm1(y[small]))
            yb = y[~small]
            out[~small] = yb + la + np.log1p(-a / (a + 1) * np.exp(-yb))
            return out ** (1.0 / p)

        g = default_grid() if grid is None else np.asarray(grid, float)
        return cls(g, fn(g), p, None, p, fn, inv, grid=g, label=f"log-family(a={a:g})")

    @classmethod
    def from_csv(cls, path, p=None) -> YoungFunction:
        exps = {}
        with open(path) as fh:
            for line in fh:
                if not line.startswith("#"):
                    break
                for tok in line[1:].replace(",", " ").split():
                    if "=" in tok:
                        k, v = tok.split("=", 1)
                        exps[k.strip()] = float(v)
        data = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
        return cls(data[:, 0], data[:, 1], exps.get("exp0"), exps.get("exp_inf"),
                   p if p is not None else exps.get("p"), label=str(path))

    def to_csv(self, path) -> None:
        head = f"exp0={self.exp0!r} exp_inf={self.exp_inf!r}"
        if self.p is not None:
            head += f" p={float(self.p)!r}"
        np.savetxt(path, np.column_stack([self.t, self(self.t)]), delimiter=",",
                   header=head + "\nt,phi", comments="# ", fmt="%.17g")

    # evaluation ---------------------------------------------------------

    def __call__(self, x):
        if self.fn is not None:
            x = np.asarray(x, float)
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                return np.where(x > 0, self.fn(np.where(x > 0, x, 1.0)), 0.0)
        return _loglog(x, self.nodes_t, self.nodes_v, self.exp0, self.exp_inf)

    def inverse(self, y):
        if self.inv is not None:
            y = np.asarray(y, float)
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                return np.where(y > 0, self.inv(np.where(y > 0, y, 1.0)), 0.0)
        return _loglog(y, self.nodes_v, self.nodes_t, 1.0 / self.exp0, 1.0 / self.exp_inf)

    def phi_p(self, x, p: float | None = None):
        """phi(x^{1/p})."""
        p = self.p if p is None else p
        return self(np.asarray(x, float) ** (1.0 / p))

    def derivative(self, x, rel: float = 1e-6):
        """Density b(t) = phi'(t) by a symmetric log-step difference."""
        x = np.asarray(x, float)
        h = rel
        up, dn = self(x * math.exp(h)), self(x * math.exp(-h))
        return (up - dn) / (x * (math.exp(h) - math.exp(-h)))

    @property
    def values(self) -> np.ndarray:
        return self(self.t)

    def __repr__(self) -> str:
        return f"YoungFunction({self.label}, p={self.p}, flags={sorted(self.flags)})"


def _dense_young(tt, vv, p, label, flags=(), knots=(), exp0=None, exp_inf=None) -> YoungFunction:
    return YoungFunction(tt, vv, exp0, exp_inf, p, label=label, flags=flags, knots=knots)


@dataclass(frozen=True)
class FractionalParams:
    """Exponents and constants of the fractional kernel |h|^{-d-sp}."""

    s: float
    p: float = 2.0
    d: int = 1

    def __post_init__(self):
        if not 0 < self.s < 1:
            raise ValueError("s must lie in (0, 1)")
        if 1 / self.p - self.s / self.d <= 0:
            raise ValueError("need 1/p - s/d > 0")

    @property
    def p_star(self) -> float:
        return 1.0 / (1.0 / self.p - self.s / self.d)

    @property
    def gamma(self) -> float:
        return gamma_s(self.s, self.p, self.d)

    @property
    def theta(self) -> float:
        return self.gamma ** (-1.0 / self.p)

    def phi(self) -> YoungFunction:
        return YoungFunction.power(self.gamma ** (self.p_star / self.p), self.p_star, self.p,
                                   label=f"fractional(s={self.s:g})")

    def kernel(self) -> Kernel:
        return Kernel.fractional(self.s, self.p, self.d)


def fit_power(phi: YoungFunction, t=None) -> tuple[float, float]:
    """Least-squares fit of log phi = log c + q log t; returns (q, c)."""
    t = phi.t if t is None else np.asarray(t, float)
    q, lc = np.polyfit(np.log(t), np.log(phi(t)), 1)
    return float(q), float(math.exp(lc))


def critical_young(w: TailProfile, grid=None) -> YoungFunction:
    """Critical function: the inverse of t -> 1 / w(1/t).

    The samples of w give phi(1/w(r)) = 1/r exactly; evaluation between them
    is log-log linear, which is exact for power-law profiles.
    """
    if np.any(np.diff(w.w) <= 0):
        i = int(np.nonzero(np.diff(w.w) <= 0)[0][0])
        raise NonInvertibleError(f"w is flat near r={w.r[i]:.6g}")
    tt = (1.0 / w.w)[::-1]
    vv = (1.0 / w.r)[::-1]
    exp_inf = 1.0 / w.exp0
    exp0 = 1.0 / w.exp_inf
    knots = [float(1.0 / w(np.array(k))) for k in w.knots]
    phi = YoungFunction(tt, vv, exp0, exp_inf, w.p, grid=grid,
                        label=f"critical({w.mode})", knots=knots)
    phi.critical = True
    return phi


@dataclass(frozen=True)
class ConvexityResult:
    passed: bool
    witness: tuple | None = None
    defect: float = 0.0


def check_convexity_phi_p(phi: YoungFunction, p: float | None = None,
                          rtol: float = 1e-10) -> ConvexityResult:
    """Discrete convexity of x -> phi(x^{1/p}) on the sample grid.

    On failure the witness is the triple (x1, x2, x3) whose middle point lies
    above the chord.
    """
    p = phi.p if p is None else p
    x = phi.t ** p
    f = phi(phi.t)
    slopes = np.diff(f) / np.diff(x)
    jump = slopes[1:] - slopes[:-1]
    scale = np.maximum(np.abs(slopes[1:]), np.abs(slopes[:-1]))
    bad = np.nonzero(jump < -rtol * scale)[0]
    if bad.size == 0:
        return ConvexityResult(True)
    i = int(bad[np.argmin(jump[bad] / scale[bad])])
    return ConvexityResult(False, (float(x[i]), float(x[i + 1]), float(x[i + 2])),
                           float(-jump[i] / scale[i]))


@dataclass(frozen=True)
class GrowthResult:
    theta: float | None
    passed: bool
    witness: tuple | None = None
    candidates: int = 64


def _growth_ok(phi: YoungFunction, theta: float, S, T, R, rtol: float):
    lhs = phi(theta * S / T)
    ok = lhs <= R * (1 + rtol)
    if ok.all():
        return True, None
    i = int(np.argmax(lhs / R))
    return False, (float(S[i]), float(T[i]))


def _theta_on(phi, t, cands, refine, rtol):
    i, j = np.triu_indices(t.size)
    S, T = t[i], t[j]
    vals = phi(t)
    R = vals[i] / vals[j]
    ok_theta, fail_theta, witness = None, None, None
    for th in cands:
        ok, wit = _growth_ok(phi, th, S, T, R, rtol)
        if ok:
            ok_theta = th
        else:
            fail_theta, witness = th, wit
            break
    if ok_theta is not None and fail_theta is not None and refine:
        a, b = ok_theta, fail_theta
        for _ in range(60):
            mid = math.sqrt(a * b)
            ok, wit = _growth_ok(phi, mid, S, T, R, rtol)
            if ok:
                a = mid
            else:
                b, witness = mid, wit
            if b / a - 1 < 1e-14:
                break
        ok_theta = a
    return ok_theta, witness


def growth_theta(phi: YoungFunction, n: int = 96, lo: float = 1e-4, hi: float = 1e4,
                 refine: bool = True, rtol: float = 1e-10, stability: bool = True) -> GrowthResult:
    """Largest theta with phi(theta s/t) <= phi(s)/phi(t) for sampled s <= t.

    Candidates form a log grid on [lo, hi]; the first failing candidate is then
    bisected against the last passing one, so equality cases are recovered to
    machine precision.  With ``stability`` the search is repeated on a grid
    whose range is widened by the same number of decades on each side (using
    the power-law ends); a theta that drops there is an artefact of the finite
    range and the result is reported as a failure.
    """
    cands = np.logspace(math.log10(lo), math.log10(hi), n)
    theta, witness = _theta_on(phi, phi.t, cands, refine, rtol)
    if theta is None:
        return GrowthResult(None, False, witness, n)
    if stability:
        l0, l1 = math.log10(phi.t[0]), math.log10(phi.t[-1])
        span = l1 - l0
        wide = np.unique(np.concatenate([np.logspace(l0 - span, l1 + span, phi.t.size), phi.t]))
        theta_w, wit_w = _theta_on(phi, wide, cands, refine, rtol)
        if theta_w is None or theta_w < theta * (1 - 1e-6):
            return GrowthResult(None, False, wit_w, n)
    return GrowthResult(float(theta), True, None, n)


def conjugate(phi: YoungFunction, n: int = 1024) -> YoungFunction:
    """Numeric Legendre transform sup_s (t s - phi(s)).

    A discrete maximum over a dense sample of s is refined by golden-section
    search inside the neighbouring bracket.
    """
    s = np.logspace(math.log10(phi.t[0]), math.log10(phi.t[-1]), 4 * n)
    fs = phi(s)
    b = phi.derivative(phi.t)
    b = b[np.isfinite(b) & (b > 0)]
    lo, hi = b[1], b[-2]
    tt = np.unique(np.concatenate([np.logspace(math.log10(lo), math.log10(hi), n),
                                   b[(b >= lo) & (b <= hi)]]))
    out = np.empty_like(tt)
    for k, t in enumerate(tt):
        g = t * s - fs
        i = int(np.argmax(g))
        best = g[i]
        if 0 < i < s.size - 1 and g[i] > g[i - 1] and g[i] > g[i + 1]:
            res = minimize_scalar(lambda x: -(t * x - float(phi(x))),
                                  bracket=(s[i - 1], s[i], s[i + 1]), method="golden",
                                  options={"xtol": 1e-12})
            best = max(best, -float(res.fun))
        out[k] = best
    keep = out > 0
    tt, out = tt[keep], out[keep]
    e0 = phi.exp0 / (phi.exp0 - 1) if phi.exp0 > 1 else None
    einf = phi.exp_inf / (phi.exp_inf - 1) if phi.exp_inf > 1 else None
    # conjugate exponents swap ends: small t pairs with small s
    return YoungFunction(tt, out, e0, einf, None, label=f"conj({phi.label})",
                         grid=tt[1:-1] if tt.size > 258 else None)


def _crossings(phi1: YoungFunction, phi2: YoungFunction, lo: float, hi: float) -> list[float]:
    x = np.logspace(math.log10(lo), math.log10(hi), 4097)
    with np.errstate(divide="ignore"):
        diff = np.log(phi1(x)) - np.log(phi2(x))
    out = []
    sgn = np.sign(diff)
    for k in np.nonzero(sgn[:-1] * sgn[1:] < 0)[0]:
        f = lambda u: float(np.log(phi1(math.exp(u))) - np.log(phi2(math.exp(u))))  # noqa: E731
        out.append(math.exp(brentq(f, math.log(x[k]), math.log(x[k + 1]), xtol=1e-15)))
    # exact zeros count only where the sign flips across them
    for k in np.nonzero(sgn[1:-1] == 0)[0] + 1:
        if sgn[k - 1] * sgn[k + 1] < 0:
            out.append(float(x[k]))
    return sorted(out)


def combine(phi1: YoungFunction, phi2: YoungFunction, mode: str = "max",
            n: int = 4097) -> YoungFunction:
    """Pointwise max, pointwise min, or the integral minorant
    phi_min(t) = int_0^t min(phi1, phi2)(s) / s ds."""
    if mode not in ("max", "min", "minorant"):
        raise ValueError("mode must be max, min or minorant")
    p = phi1.p if phi1.p == phi2.p else None
    grid = np.unique(np.concatenate([phi1.t, phi2.t]))
    lo, hi = grid[0], grid[-1]
    cross = _crossings(phi1, phi2, lo / 1e3, hi * 1e3)
    if mode in ("max", "min"):
        pick = np.maximum if mode == "max" else np.minimum
        fn = lambda x: pick(phi1(x), phi2(x))  # noqa: E731
        if phi1.inv is not None or phi2.inv is not None:
            back = np.minimum if mode == "max" else np.maximum
            inv = lambda y: back(phi1.inverse(y), phi2.inverse(y))  # noqa: E731
        else:
            inv = None
        tt = np.unique(np.concatenate([np.logspace(math.log10(lo), math.log10(hi), n), cross]))
        vv = fn(tt)
        # end exponents follow whichever function is active there
        e0_1, e0_2 = phi1.exp0, phi2.exp0
        ei_1, ei_2 = phi1.exp_inf, phi2.exp_inf
        small = phi1(tt[0]) >= phi2(tt[0]) if mode == "max" else phi1(tt[0]) <= phi2(tt[0])
        large = phi1(tt[-1]) >= phi2(tt[-1]) if mode == "max" else phi1(tt[-1]) <= phi2(tt[-1])
        e0 = e0_1 if small else e0_2
        ei = ei_1 if large else ei_2
        flags = {"possibly-nonconvex"} if mode == "min" else set()
        return YoungFunction(tt, vv, e0, ei, p, fn=fn, inv=inv, grid=grid,
                             label=f"{mode}({phi1.label},{phi2.label})", flags=flags, knots=cross)
    # minorant: m(s)/s integrated exactly on log-log linear pieces
    tt = np.unique(np.concatenate([np.logspace(math.log10(lo), math.log10(hi), n), cross]))
    m = np.minimum(phi1(tt), phi2(tt))
    lt, lm = np.log(tt), np.log(m)
    beta = np.diff(lm) / np.diff(lt)
    dm = np.diff(m)
    with np.errstate(divide="ignore", invalid="ignore"):
        piece = np.where(np.abs(beta) > 1e-12, dm / beta, m[:-1] * np.diff(lt))
    # below the first node m ~ m0 (s/t0)^e0, so the integral up to t0 is m0/e0
    e0 = float(beta[0])
    start = m[0] / e0
    vals = start + np.concatenate([[0.0], np.cumsum(piece)])
    return YoungFunction(tt, vals, e0, None, p, grid=grid,
                         label=f"minorant({phi1.label},{phi2.label})", knots=cross)


@dataclass
class AsymptoticReport:
    ratio_large: float
    ratio_small: float
    l1_norm: float
    integrable: bool
    n_function: bool
    large_t_error: float
    residual: list

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def asymptotic_rates(phi: YoungFunction, kernel: Kernel, radii=(1.0, 10.0, 100.0)) -> AsymptoticReport:
    """Compare phi(t)/t^p at the grid ends with the limits fixed by the kernel
    and evaluate both sides of the residual identity on balls B_r."""
    p = kernel.p
    t = phi.t
    ratio_large = float(phi(t[-1]) / t[-1] ** p)
    ratio_small = float(phi(t[0]) / t[0] ** p)
    # mass of nu: the p-Lévy modular plus the missing inner part
    inner = kernel.radial_moment(0.0, 1.0, 0.0)
    outer = kernel.radial_moment(1.0, np.inf, 0.0)
    l1 = float((inner + outer) * kernel.d * unit_ball_volume(kernel.d))
    integrable = bool(np.isfinite(l1))
    rel = abs(ratio_large - l1) / l1 if integrable else np.inf
    # phi_p is an N-function when phi(t)/t^p is unbounded at infinity and tends to 0 at 0
    slope = np.log(phi(t[-1]) / phi(t[-2])) / np.log(t[-1] / t[-2])
    n_function = (not integrable) and slope > p and ratio_small < ratio_large
    residual = []
    cd = unit_ball_volume(kernel.d)
    for r in radii:
        m = cd * r ** kernel.d
        lhs = m ** (-1.0 / p) / float(phi.inverse(1.0 / m))
        rhs = float(nu_sharp(kernel, m)) ** (1.0 / p)
        residual.append({"radius": r, "lhs": lhs, "rhs": rhs,
                         "rel_error": abs(lhs - rhs) / max(abs(rhs), 1e-300)})
    return AsymptoticReport(ratio_large, ratio_small, l1, integrable, bool(n_function), rel, residual)
