"""Radial p-Lévy kernels, tail masses and exterior-mass functions.

Every radial profile is stored as a piecewise power law

    nu(rho) = c_i * rho**alpha_i    for breaks[i] <= rho < breaks[i + 1],

with ``breaks[0] = 0`` and ``breaks[-1] = inf``.  Fractional, truncated and
indicator kernels are exact in this form and tabulated profiles are read as
log-log linear interpolants, so radial moments are available in closed form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import simpson

__all__ = [
    "Kernel",
    "GridKernel",
    "TailProfile",
    "SetSpec",
    "LevyModular",
    "ExteriorMassReport",
    "NotLevyError",
    "SaturationError",
    "KappaError",
    "unit_ball_volume",
    "sphere_area",
    "eta",
    "gamma_s",
    "radial_quad",
    "levy_modular",
    "tail_mass",
    "w_profile",
    "almost_decreasing_kappa",
    "rearrange_kernel",
    "nu_star",
    "nu_sharp",
    "exterior_mass_bound",
    "kernel_from_young",
]


class NotLevyError(ValueError):
    """The kernel fails the p-Lévy integrability condition."""


class SaturationError(ValueError):
    """The profile w stops increasing, so the critical function is undefined beyond it.

    ``radius`` is inf when w only flattens at infinity; ``bound`` is then its
    supremum, and phi is undefined below 1/bound.
    """

    def __init__(self, message: str, radius: float, bound: float | None = None):
        super().__init__(message)
        self.radius = radius
        self.bound = bound


class KappaError(ValueError):
    """No positive almost-decreasing constant exists on the sampled radii."""

    def __init__(self, message: str, witness: tuple[float, float]):
        super().__init__(message)
        self.witness = witness


def unit_ball_volume(d: int) -> float:
    """Lebesgue measure c_d of the unit ball in R^d."""
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1)


def sphere_area(d: int) -> float:
    """Surface measure of the unit sphere S^{d-1}, equal to d * c_d."""
    return d * unit_ball_volume(d)


def eta(r, d: int):
    """Radius of the ball of measure ``r``."""
    return (np.asarray(r, dtype=float) / unit_ball_volume(d)) ** (1.0 / d)


def gamma_s(s: float, p: float, d: int) -> float:
    """Constant of the fractional profile, d c_d^{1+sp/d} / (sp)."""
    return d * unit_ball_volume(d) ** (1 + s * p / d) / (s * p)


def _power_integral(c: float, beta: float, lo, hi) -> np.ndarray:
    """Integral of c * rho**beta over [lo, hi], elementwise; inf when divergent."""
    lo, hi = np.broadcast_arrays(np.asarray(lo, float), np.asarray(hi, float))
    out = np.zeros(lo.shape)
    if c == 0.0:
        return out
    e = beta + 1.0
    m = hi > lo
    fin = m & (lo > 0) & np.isfinite(hi)
    if fin.any():
        L = np.log(hi[fin] / lo[fin])
        if abs(e) < 1e-14:
            out[fin] = L
        else:
            out[fin] = lo[fin] ** e * np.expm1(e * L) / e
    zl = m & (lo == 0) & np.isfinite(hi)
    if zl.any():
        out[zl] = hi[zl] ** e / e if e > 0 else np.inf
    zh = m & (lo > 0) & np.isinf(hi)
    if zh.any():
        out[zh] = -(lo[zh] ** e) / e if e < 0 else np.inf
    both = m & (lo == 0) & np.isinf(hi)
    out[both] = np.inf
    return c * out


@dataclass(frozen=True, eq=False)
class Kernel:
    """Radial kernel nu(|h|) on R^d paired with an exponent p.

    Parameters
    ----------
    dimension, exponent : the ambient dimension d and the exponent p.
    breaks : increasing radii starting at 0 and ending at inf.
    coefs, powers : per-segment coefficient and exponent.
    kind : family tag, one of ``fractional``, ``piecewise``, ``max-fractional``,
        ``min-fractional``, ``indicator``, ``log``, ``tabulated``, ``rearranged``.
    params : family parameters, echoed in reports.
    density : optional exact radial density used by quadrature checks.
    """

    dimension: int
    exponent: float
    breaks: np.ndarray
    coefs: np.ndarray
    powers: np.ndarray
    kind: str = "tabulated"
    params: dict = field(default_factory=dict)
    density: Callable | None = None
    radial: bool = True

    def __post_init__(self):
        b = np.asarray(self.breaks, float)
        c = np.asarray(self.coefs, float)
        a = np.asarray(self.powers, float)
        if b[0] != 0.0 or not np.isinf(b[-1]) or np.any(np.diff(b) <= 0):
            raise ValueError("breaks must increase from 0 to inf")
        if len(c) != len(b) - 1 or len(a) != len(c):
            raise ValueError("one coefficient and one power per segment")
        if np.any(c < 0):
            raise ValueError("kernel values must be nonnegative")
        if self.dimension < 1 or self.exponent < 1:
            raise ValueError("need d >= 1 and p >= 1")
        object.__setattr__(self, "breaks", b)
        object.__setattr__(self, "coefs", c)
        object.__setattr__(self, "powers", a)

    # construction -------------------------------------------------------

    @classmethod
    def fractional(cls, s: float, p: float = 2.0, d: int = 1, scale: float = 1.0) -> Kernel:
        """scale * |h|^{-d-sp}."""
        if not 0 < s < 1:
            raise ValueError("s must lie in (0, 1)")
        return cls(d, p, [0.0, np.inf], [scale], [-d - s * p], "fractional",
                   {"s": s, "p": p, "d": d, "scale": scale})

    @classmethod
    def piecewise_fractional(cls, s_in: float, s_out: float, radius: float,
                             c_in: float = 1.0, c_out: float = 1.0,
                             p: float = 2.0, d: int = 1, kind: str = "piecewise") -> Kernel:
        """c_in |h|^{-d-s_in p} inside B(0, radius), c_out |h|^{-d-s_out p} outside."""
        params = {"s_in": s_in, "s_out": s_out, "radius": radius,
                  "c_in": c_in, "c_out": c_out, "p": p, "d": d}
        return cls(d, p, [0.0, radius, np.inf], [c_in, c_out],
                   [-d - s_in * p, -d - s_out * p], kind, params)

    @classmethod
    def max_fractional(cls, s1: float, s2: float, p: float = 2.0, d: int = 1) -> Kernel:
        """Kernel whose critical function is max(t^{p*_{s1}}, t^{p*_{s2}}), s1 < s2."""
        if not 0 < s1 < s2 < 1:
            raise ValueError("need 0 < s1 < s2 < 1")
        k = cls.piecewise_fractional(s2, s1, float(eta(1.0, d)), 1 / gamma_s(s2, p, d),
                                     1 / gamma_s(s1, p, d), p, d, "max-fractional")
        k.params.update(s1=s1, s2=s2)
        return k

    @classmethod
    def min_fractional(cls, s1: float, s2: float, p: float = 2.0, d: int = 1) -> Kernel:
        """Kernel whose critical function is min(t^{p*_{s1}}, t^{p*_{s2}}), s1 < s2."""
        if not 0 < s1 < s2 < 1:
            raise ValueError("need 0 < s1 < s2 < 1")
        k = cls.piecewise_fractional(s1, s2, float(eta(1.0, d)), 1 / gamma_s(s1, p, d),
                                     1 / gamma_s(s2, p, d), p, d, "min-fractional")
        k.params.update(s1=s1, s2=s2)
        return k

    @classmethod
    def indicator_ball(cls, radius: float = 1.0, p: float = 2.0, d: int = 1,
                       height: float = 1.0) -> Kernel:
        """height * 1_{B(0, radius)}."""
        return cls(d, p, [0.0, radius, np.inf], [height, 0.0], [0.0, 0.0], "indicator",
                   {"radius": radius, "height": height, "p": p, "d": d})

    @classmethod
    def tabulated(cls, radii, values, p: float = 2.0, d: int = 1,
                  exp0: float | None = None, exp_inf: float | None = None,
                  kind: str = "tabulated", params: dict | None = None,
                  density: Callable | None = None) -> Kernel:
        """Log-log linear interpolant of samples with power-law ends.

        A segment with a zero endpoint is taken to vanish identically.
        """
        r = np.asarray(radii, float)
        v = np.asarray(values, float)
        if r.ndim != 1 or r.size < 2 or r.size != v.size:
            raise ValueError("need matching 1-d radius and value arrays")
        if r[0] <= 0 or np.any(np.diff(r) <= 0):
            raise ValueError("radii must be positive and strictly increasing")
        if np.any(v < 0) or not np.all(np.isfinite(v)):
            raise ValueError("values must be finite and nonnegative")
        pos = v > 0
        with np.errstate(divide="ignore", invalid="ignore"):
            lv = np.where(pos, np.log(np.where(pos, v, 1.0)), 0.0)
            slopes = np.diff(lv) / np.diff(np.log(r))
        live = pos[:-1] & pos[1:]
        slopes = np.where(live, slopes, 0.0)
        mid_c = np.where(live, v[:-1] / r[:-1] ** slopes, 0.0)
        if exp0 is None:
            exp0 = float(slopes[0]) if live[0] else 0.0
        if exp_inf is None:
            exp_inf = float(slopes[-1]) if live[-1] else 0.0
        c0 = v[0] / r[0] ** exp0 if pos[0] else 0.0
        cinf = v[-1] / r[-1] ** exp_inf if pos[-1] else 0.0
        breaks = np.concatenate([[0.0], r, [np.inf]])
        coefs = np.concatenate([[c0], mid_c, [cinf]])
        powers = np.concatenate([[exp0], slopes, [exp_inf]])
        return cls(d, p, breaks, coefs, powers, kind, dict(params or {}), density)

    @classmethod
    def from_csv(cls, path, p: float = 2.0, d: int = 1, **kw) -> Kernel:
        """Load a two-column (radius, value) profile."""
        data = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
        if data.shape[1] != 2:
            raise ValueError(f"{path}: expected two columns")
        return cls.tabulated(data[:, 0], data[:, 1], p=p, d=d, **kw)

    def to_csv(self, path, radii=None) -> None:
        r = np.logspace(-4, 4, 257) if radii is None else np.asarray(radii, float)
        np.savetxt(path, np.column_stack([r, self(r)]), delimiter=",",
                   header="radius,value", comments="# ")

    @classmethod
    def log_family(cls, a: float, p: float = 2.0, d: int = 1, n: int = 4097,
                   lo: float = 1e-8, hi: float = 1e8) -> Kernel:
        """Kernel attached to phi^a(t) = ln(a + e^{t^p}) - ln(a + 1), tabulated."""
        dens = _log_family_density(a, d)
        rho = np.logspace(math.log10(lo), math.log10(hi), n)
        return cls.tabulated(rho, dens(rho), p=p, d=d, kind="log",
                             params={"a": a, "p": p, "d": d}, density=dens)

    # evaluation ---------------------------------------------------------

    @property
    def d(self) -> int:
        return self.dimension

    @property
    def p(self) -> float:
        return self.exponent

    def __call__(self, rho):
        rho = np.asarray(rho, float)
        idx = np.clip(np.searchsorted(self.breaks, rho, side="right") - 1, 0, len(self.coefs) - 1)
        c = self.coefs[idx]
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            val = np.where(c > 0, c * rho ** self.powers[idx], 0.0)
        return val

    def exact(self, rho):
        """Exact density when one is attached, else the stored profile."""
        return self.density(np.asarray(rho, float)) if self.density is not None else self(rho)

    def radial_moment(self, a, b, j: float = 0.0) -> np.ndarray:
        """Integral of rho^{j+d-1} nu(rho) over [a, b] (no angular factor)."""
        a, b = np.broadcast_arrays(np.asarray(a, float), np.asarray(b, float))
        total = np.zeros(a.shape)
        extra = j + self.dimension - 1
        for lo_b, hi_b, c, al in zip(self.breaks[:-1], self.breaks[1:], self.coefs, self.powers):
            if c == 0.0:
                continue
            lo = np.clip(a, lo_b, hi_b)
            hi = np.clip(b, lo_b, hi_b)
            total = total + _power_integral(c, al + extra, lo, hi)
        return total

    @property
    def support_radius(self) -> float:
        live = np.nonzero(self.coefs > 0)[0]
        if live.size == 0:
            return 0.0
        return float(self.breaks[live[-1] + 1])

    def is_nonincreasing(self) -> bool:
        """Whether the stored profile is radially nonincreasing."""
        live = self.coefs > 0
        if np.any(live & (self.powers > 0)):
            return False
        inner = self.breaks[1:-1]
        left = self(inner * (1 - 1e-12))
        right = self(inner)
        return bool(np.all(right <= left * (1 + 1e-12)))

    def describe(self) -> dict:
        return {"kind": self.kind, "d": self.dimension, "p": self.exponent, **self.params}

    def characteristic_radii(self) -> np.ndarray:
        """Finite positive breaks, used to anchor sampling grids."""
        return self.breaks[1:-1]


def _log_family_density(a: float, d: int) -> Callable:
    cd = unit_ball_volume(d)
    la = math.log(a + 1)
    q = a / (a + 1)

    def xi(r):
        # ln((a+1) e^{1/r} - a) without overflow
        r = np.asarray(r, float)
        y = 1.0 / r
        small = y < 1.0
        out = np.empty_like(y)
        out[small] = np.log1p((a + 1) * np.expm1(y[small]))
        yb = y[~small]
        out[~small] = yb + la + np.log1p(-q * np.exp(-yb))
        return out

    def dens(rho):
        rho = np.asarray(rho, float)
        r = cd * rho ** d
        x = xi(r)
        y = 1.0 / r
        small = y < 1.0
        g = np.empty_like(y)
        # (a+1) e^{y} / ((a+1) e^{y} - a)
        g[small] = (a + 1) * np.exp(y[small]) / (1 + (a + 1) * np.expm1(y[small]))
        g[~small] = 1.0 / (1.0 - q * np.exp(-y[~small]))
        dxi = -g / r ** 2
        return (x + r * dxi) / (r * x) ** 2

    dens.xi = xi
    return dens


@dataclass(frozen=True, eq=False)
class GridKernel:
    """Kernel sampled on a uniform grid centred at the origin (possibly non-radial)."""

    values: np.ndarray
    spacing: float
    exponent: float = 2.0

    @property
    def dimension(self) -> int:
        return np.asarray(self.values).ndim

    def coordinates(self):
        v = np.asarray(self.values)
        axes = [(np.arange(n) - (n - 1) / 2) * self.spacing for n in v.shape]
        return np.meshgrid(*axes, indexing="ij")

    def radii(self) -> np.ndarray:
        return np.sqrt(sum(c ** 2 for c in self.coordinates()))

    def level_measure(self, s: float) -> float:
        return float(np.count_nonzero(np.asarray(self.values) > s)) * self.spacing ** self.dimension


@dataclass(frozen=True, eq=False)
class TailProfile:
    """Samples of r -> w(r) on a log grid with power-law ends."""

    r: np.ndarray
    w: np.ndarray
    p: float
    d: int
    exp0: float
    exp_inf: float
    mode: str = "tail"
    knots: tuple = ()

    @property
    def c_d(self) -> float:
        return unit_ball_volume(self.d)

    def eta(self, r):
        return eta(r, self.d)

    def __call__(self, r):
        r = np.asarray(r, float)
        lr, lw = np.log(self.r), np.log(self.w)
        with np.errstate(divide="ignore"):
            x = np.log(np.where(r > 0, r, 1.0))
        out = np.interp(x, lr, lw)
        lo = x < lr[0]
        hi = x > lr[-1]
        out = np.where(lo, lw[0] + self.exp0 * (x - lr[0]), out)
        out = np.where(hi, lw[-1] + self.exp_inf * (x - lr[-1]), out)
        return np.where(r > 0, np.exp(out), 0.0)

    def wp(self, r):
        return self(r) ** self.p

    def inverse(self, y):
        y = np.asarray(y, float)
        lr, lw = np.log(self.r), np.log(self.w)
        with np.errstate(divide="ignore"):
            x = np.log(np.where(y > 0, y, 1.0))
        out = np.interp(x, lw, lr)
        out = np.where(x < lw[0], lr[0] + (x - lw[0]) / self.exp0, out)
        out = np.where(x > lw[-1], lr[-1] + (x - lw[-1]) / self.exp_inf, out)
        return np.where(y > 0, np.exp(out), 0.0)

    def check(self, rtol: float = 1e-10) -> bool:
        """w nondecreasing and w^p(r)/r nonincreasing on the samples."""
        wp_r = self.w ** self.p / self.r
        return bool(np.all(np.diff(self.w) >= -rtol * self.w[1:])
                    and np.all(np.diff(wp_r) <= rtol * wp_r[:-1]))


@dataclass(frozen=True)
class SetSpec:
    """Finite disjoint union of axis-aligned boxes and balls."""

    boxes: tuple = ()
    balls: tuple = ()

    @classmethod
    def interval(cls, lo: float, hi: float) -> SetSpec:
        return cls(boxes=(((lo,), (hi,)),))

    @classmethod
    def ball(cls, center, radius: float) -> SetSpec:
        return cls(balls=((tuple(np.atleast_1d(center).astype(float)), float(radius)),))

    @property
    def dimension(self) -> int:
        if self.boxes:
            return len(self.boxes[0][0])
        return len(self.balls[0][0])

    @property
    def measure(self) -> float:
        m = sum(float(np.prod(np.subtract(hi, lo))) for lo, hi in self.boxes)
        d = self.dimension
        m += sum(unit_ball_volume(d) * r ** d for _, r in self.balls)
        if m <= 0:
            raise ValueError("set must have positive measure")
        return m

    @property
    def radius(self) -> float:
        """Radius r_E of the ball with the same measure."""
        return float(eta(self.measure, self.dimension))

    def _extreme_points(self):
        pts, rad = [], []
        for lo, hi in self.boxes:
            for corner in np.array(np.meshgrid(*zip(lo, hi), indexing="ij")).reshape(len(lo), -1).T:
                pts.append(corner)
                rad.append(0.0)
        for c, r in self.balls:
            pts.append(np.asarray(c, float))
            rad.append(r)
        return np.array(pts), np.array(rad)

    @property
    def diameter(self) -> float:
        pts, rad = self._extreme_points()
        dist = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1)
        span = dist + rad[:, None] + rad[None, :]
        np.fill_diagonal(span, 2 * rad)
        return float(span.max())

    def contains(self, x) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, float))
        if x.shape[1] != self.dimension:
            x = x.T
        inside = np.zeros(x.shape[0], bool)
        for lo, hi in self.boxes:
            inside |= np.all((x > np.asarray(lo)) & (x < np.asarray(hi)), axis=1)
        for c, r in self.balls:
            inside |= np.linalg.norm(x - np.asarray(c), axis=1) < r
        return inside

    def bounding_box(self):
        pts, rad = self._extreme_points()
        return pts.min(axis=0) - rad.max(), pts.max(axis=0) + rad.max()


def radial_quad(f: Callable, a: float, b: float, rtol: float = 1e-8,
                n0: int = 64, nmax: int = 2 ** 20) -> tuple[float, float]:
    """Integral of f over [a, b] with rho = e^u and composite Simpson refinement.

    Returns the value and the last change between refinements.
    """
    if not 0 < a < b < np.inf:
        raise ValueError("need 0 < a < b < inf")
    ua, ub = math.log(a), math.log(b)
    n = n0
    prev = None
    while True:
        u = np.linspace(ua, ub, n + 1)
        rho = np.exp(u)
        val = float(simpson(f(rho) * rho, x=u))
        if prev is not None:
            change = abs(val - prev)
            if change <= rtol * abs(val) or n >= nmax:
                return val, change
        prev = val
        n *= 2


@dataclass(frozen=True)
class LevyModular:
    """Outcome of the p-Lévy integrability test."""

    value: float
    is_levy: bool
    reason: str = ""

    def __float__(self) -> float:
        return self.value


def _end_exponents(kernel: Kernel) -> tuple[float | None, float | None]:
    live = np.nonzero(kernel.coefs > 0)[0]
    if live.size == 0:
        return None, None
    a0 = kernel.powers[0] if kernel.coefs[0] > 0 else None
    ainf = kernel.powers[-1] if kernel.coefs[-1] > 0 else None
    return a0, ainf


def levy_modular(kernel: Kernel, rtol: float = 1e-8) -> LevyModular:
    """Integral of min(1, |h|^p) nu(h) over R^d.

    Smooth pieces use :func:`radial_quad`; the parts below the first and above
    the last break are integrated in closed form from the end exponents.
    """
    d, p = kernel.d, kernel.p
    a0, ainf = _end_exponents(kernel)
    if a0 is not None and a0 <= -d - p:
        return LevyModular(np.inf, False, f"not p-Lévy: origin exponent {a0:g} <= -d-p")
    if ainf is not None and ainf >= -d:
        return LevyModular(np.inf, False, f"not p-Lévy: tail exponent {ainf:g} >= -d")
    dens = kernel.exact
    inner = kernel.characteristic_radii()
    if kernel.density is not None:
        lo, hi = 1e-6, 1e6
        cuts = [lo, 1.0, hi]
    elif inner.size <= 16:
        lo = min(1e-3, inner.min() / 10) if inner.size else 1e-3
        hi = max(1e3, inner.max() * 10) if inner.size else 1e3
        cuts = sorted({lo, 1.0, hi, *inner.tolist()})
    else:
        v = float(kernel.radial_moment(0.0, 1.0, p) + kernel.radial_moment(1.0, np.inf, 0.0))
        return LevyModular(sphere_area(d) * v, bool(np.isfinite(v)))
    total = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        j = p if a < 1.0 else 0.0
        # evaluate strictly inside (a, b) so one-sided limits are used at breaks
        lo_in, hi_in = a * (1 + 1e-13), b * (1 - 1e-13)

        def f(r, j=j, lo_in=lo_in, hi_in=hi_in):
            return r ** (j + d - 1) * dens(np.clip(r, lo_in, hi_in))

        total += radial_quad(f, a, b, rtol)[0]
    # analytic ends from the stored power laws
    total += float(kernel.radial_moment(0.0, lo, p))
    total += float(kernel.radial_moment(hi, np.inf, 0.0))
    value = sphere_area(d) * total
    return LevyModular(value, bool(np.isfinite(value)), "" if np.isfinite(value) else "divergent")


def tail_mass(kernel: Kernel, rho) -> np.ndarray | float:
    """Mass of nu outside B(0, rho)."""
    rho = np.asarray(rho, float)
    if np.any(rho <= 0):
        raise ValueError("rho must be positive")
    a0, ainf = _end_exponents(kernel)
    if ainf is not None and ainf >= -kernel.d:
        raise NotLevyError("divergent tail")
    val = sphere_area(kernel.d) * kernel.radial_moment(rho, np.inf, 0.0)
    return float(val) if val.ndim == 0 else val


def _default_r_grid(kernel: Kernel, n: int = 1601, decades: float = 16.0) -> np.ndarray:
    r = np.logspace(-decades, decades, n)
    knots = unit_ball_volume(kernel.d) * kernel.characteristic_radii() ** kernel.d
    knots = knots[(knots > r[0]) & (knots < r[-1])]
    return np.unique(np.concatenate([r, knots]))


def w_profile(kernel: Kernel, mode: str = "tail", r=None) -> TailProfile:
    """Profile w with w^p(r) = r * tail_mass(eta(r)) or r * nu_sharp(r).

    ``mode='tail'`` uses the exterior mass of the ball; ``mode='sharp'`` the
    exterior-mass function, which needs no monotonicity of nu.
    """
    if mode not in ("tail", "sharp"):
        raise ValueError("mode must be 'tail' or 'sharp'")
    r = _default_r_grid(kernel) if r is None else np.asarray(r, float)
    if mode == "tail":
        mass = tail_mass(kernel, eta(r, kernel.d))
    else:
        mass = nu_sharp(kernel, r)
    wp = r * mass
    w = wp ** (1.0 / kernel.p)
    bad = np.nonzero((w <= 0) | ~np.isfinite(w))[0]
    stop = np.nonzero(np.diff(w) <= 0)[0]
    first = min(bad[0] if bad.size else r.size, stop[0] + 1 if stop.size else r.size)
    if first < r.size:
        k = max(first - 1, 0)
        raise SaturationError(
            f"w saturates at r* = {r[k]:.6g}; critical function undefined beyond", float(r[k]))
    lr, lw = np.log(r), np.log(w)
    exp0 = float((lw[1] - lw[0]) / (lr[1] - lr[0]))
    exp_inf = float((lw[-1] - lw[-2]) / (lr[-1] - lr[-2]))
    if exp_inf < 1e-4:
        # tail ~ c/|h|^d: w increases but is bounded, so 1/w(1/t) misses small t
        raise SaturationError(
            f"w is bounded by {w[-1]:.6g}; critical function undefined below t = {1 / w[-1]:.6g}",
            math.inf, float(w[-1]))
    knots = unit_ball_volume(kernel.d) * kernel.characteristic_radii() ** kernel.d
    return TailProfile(r, w, kernel.p, kernel.d, exp0, exp_inf, mode, tuple(knots.tolist()))


def _sample_radii(kernel: Kernel, n: int = 256) -> np.ndarray:
    inner = kernel.characteristic_radii()
    sup = kernel.support_radius
    lo = min(1e-3, inner.min() / 10) if inner.size else 1e-3
    hi = sup if np.isfinite(sup) else (max(1e3, inner.max() * 10) if inner.size else 1e3)
    r = np.logspace(math.log10(lo), math.log10(hi), n)
    if np.isfinite(sup):
        r = r[r < sup]
    near = np.concatenate([inner * (1 - 1e-9), inner])
    near = near[(near >= lo) & (near < hi)]
    return np.unique(np.concatenate([r, near]))


def almost_decreasing_kappa(kernel: Kernel, n: int = 256) -> float:
    """Largest kappa <= 1 with kappa nu(r1) <= nu(r2) for sampled r1 >= r2.

    The radii are ``n`` log-spaced points across the support plus both sides
    of every break.
    """
    r = _sample_radii(kernel, n)
    v = kernel(r)
    prefix = np.minimum.accumulate(v)
    zero_inside = np.nonzero((prefix == 0) & (v > 0))[0]
    if zero_inside.size:
        i = zero_inside[0]
        j = int(np.nonzero(v[: i + 1] == 0)[0][0])
        raise KappaError("kernel vanishes inside its support", (float(r[i]), float(r[j])))
    live = v > 0
    ratios = prefix[live] / v[live]
    kappa = float(min(1.0, ratios.min())) if ratios.size else 1.0
    if kappa <= 1e-14:
        i = int(np.argmin(ratios))
        raise KappaError("almost-decreasing constant is zero", (float(r[live][i]), float(r[0])))
    return kappa


def _distribution(kernel: Kernel, s) -> np.ndarray:
    """Measure of {nu > s} for each level s."""
    s = np.atleast_1d(np.asarray(s, float))
    cd, d = unit_ball_volume(kernel.d), kernel.d
    total = np.zeros(s.shape)
    for lo, hi, c, al in zip(kernel.breaks[:-1], kernel.breaks[1:], kernel.coefs, kernel.powers):
        if c == 0:
            continue
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            if al == 0:
                a_, b_ = np.where(c > s, lo, hi), np.full(s.shape, hi)
            else:
                cross = np.where(s > 0, (s / c) ** (1.0 / al), np.inf if al < 0 else 0.0)
                if al < 0:
                    a_, b_ = np.full(s.shape, lo), np.clip(cross, lo, hi)
                else:
                    a_, b_ = np.clip(cross, lo, hi), np.full(s.shape, hi)
        seg = cd * (np.minimum(b_, 1e300) ** d - a_ ** d)
        seg = np.where(np.isinf(b_) & (b_ > a_), np.inf, seg)
        total = total + np.maximum(seg, 0.0)
    return total


def nu_star(kernel: Kernel, rho) -> np.ndarray:
    """Symmetric decreasing rearrangement of the profile evaluated at radius rho."""
    rho = np.atleast_1d(np.asarray(rho, float))
    if kernel.is_nonincreasing():
        return kernel(rho)
    target = unit_ball_volume(kernel.d) * rho ** kernel.d
    out = np.empty_like(rho)
    vmax_probe = kernel(np.concatenate([kernel.breaks[1:-1], [1e-12, 1e12]]))
    for i, m in enumerate(target):
        if _distribution(kernel, 0.0)[0] <= m:
            out[i] = 0.0
            continue
        lo, hi = -700.0, math.log(max(vmax_probe.max(), 1.0)) + 50
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if _distribution(kernel, math.exp(mid))[0] <= m:
                hi = mid
            else:
                lo = mid
            if hi - lo < 1e-15:
                break
        out[i] = math.exp(hi)
    return out


def _sublevel_integral(kernel: Kernel, level: float) -> float:
    """Integral of nu over {nu < level}."""
    d = kernel.d
    total = 0.0
    for lo, hi, c, al in zip(kernel.breaks[:-1], kernel.breaks[1:], kernel.coefs, kernel.powers):
        if c == 0 or level <= 0:
            continue
        if al == 0:
            if c < level:
                total += float(_power_integral(c, d - 1, lo, hi))
            continue
        cross = (level / c) ** (1.0 / al)
        if al < 0:
            a_, b_ = max(lo, cross), hi
        else:
            a_, b_ = lo, min(hi, cross)
        if b_ > a_:
            total += float(_power_integral(c, al + d - 1, a_, b_))
    return sphere_area(d) * total


def nu_sharp(kernel: Kernel, measure):
    """Exterior-mass function: mass of nu on {nu < nu*(eta(measure))}."""
    m = np.atleast_1d(np.asarray(measure, float))
    if np.any(m <= 0):
        raise ValueError("measure must be positive")
    levels = nu_star(kernel, eta(m, kernel.d))
    out = np.array([_sublevel_integral(kernel, float(s)) for s in levels])
    return float(out[0]) if np.ndim(measure) == 0 else out


def rearrange_kernel(kernel) -> Kernel:
    """Radial nonincreasing kernel equimeasurable with the input.

    Grid input gives a piecewise-constant radial profile whose level sets have
    exactly the cell-counted measures of the input.
    """
    if isinstance(kernel, Kernel):
        if kernel.is_nonincreasing():
            return kernel
        return _rearrange_profile(kernel)
    if not isinstance(kernel, GridKernel):
        raise TypeError("expected Kernel or GridKernel")
    vals = np.sort(np.asarray(kernel.values, float).ravel())[::-1]
    if np.any(vals < 0):
        raise ValueError("kernel values must be nonnegative")
    vals = vals[vals > 0]
    d = kernel.dimension
    cell = kernel.spacing ** d
    k = np.arange(vals.size + 1)
    radii = eta(k * cell, d) * (1 - 1e-12)
    radii[0] = 0.0
    breaks = np.concatenate([radii, [np.inf]])
    coefs = np.concatenate([vals, [0.0]])
    return Kernel(d, kernel.exponent, breaks, coefs, np.zeros(coefs.size), "rearranged",
                  {"cells": int(vals.size), "spacing": kernel.spacing})


def _rearrange_profile(kernel: Kernel, n: int = 2049) -> Kernel:
    inner = kernel.characteristic_radii()
    lo = min(1e-6, inner.min() / 100) if inner.size else 1e-6
    hi = max(1e6, inner.max() * 100) if inner.size else 1e6
    rho = np.logspace(math.log10(lo), math.log10(hi), n)
    vals = nu_star(kernel, rho)
    vals = np.minimum.accumulate(vals)
    return Kernel.tabulated(rho, vals, p=kernel.p, d=kernel.d, kind="rearranged",
                            params={"source": kernel.kind})


@dataclass
class ExteriorMassReport:
    integral: float
    error_estimate: float
    lemma_bound: float
    sharp_bound: float
    lemma_margin: float
    sharp_margin: float
    kappa: float

    @property
    def passed(self) -> bool:
        return min(self.lemma_margin, self.sharp_margin) >= -max(self.error_estimate, 1e-12)


def _exterior_1d(kernel: Kernel, E: SetSpec, x: float) -> float:
    # complement of a finite union of intervals as distance intervals from x
    ivs = sorted((lo[0], hi[0]) for lo, hi in E.boxes)
    ivs += sorted((c[0] - r, c[0] + r) for c, r in E.balls)
    ivs.sort()
    gaps, cur = [], -np.inf
    for a, b in ivs:
        if a > cur:
            gaps.append((cur, a))
        cur = max(cur, b)
    gaps.append((cur, np.inf))
    total = 0.0
    for a, b in gaps:
        # integral of nu(|x - y|) over y in (a, b)
        if b <= x:
            total += float(kernel.radial_moment(x - b, x - a, 0.0))
        elif a >= x:
            total += float(kernel.radial_moment(a - x, b - x, 0.0))
        else:
            return np.inf
    return total


def _exterior_nd(kernel: Kernel, E: SetSpec, x, samples: int) -> float:
    lo, hi = E.bounding_box()
    x = np.asarray(x, float)
    L = float(max(np.max(np.abs(hi - x)), np.max(np.abs(x - lo)))) * 1.5
    axes = [x_i - L + (np.arange(samples) + 0.5) * (2 * L / samples) for x_i in x]
    grid = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([g.ravel() for g in grid], axis=1)
    dist = np.linalg.norm(pts - x, axis=1)
    keep = (dist < L) & ~E.contains(pts)
    cell = (2 * L / samples) ** len(x)
    inner = float(np.sum(kernel(dist[keep])) * cell)
    return inner + float(tail_mass(kernel, L))


def exterior_mass_bound(kernel: Kernel, E: SetSpec, x, samples: int = 256,
                        kappa: float | None = None) -> ExteriorMassReport:
    """Check the exterior mass of E seen from x against both lower bounds."""
    d = kernel.d
    x = np.atleast_1d(np.asarray(x, float))
    if d == 1:
        val = _exterior_1d(kernel, E, float(x[0]))
        err = 1e-12 * abs(val)
    else:
        val = _exterior_nd(kernel, E, x, samples)
        coarse = _exterior_nd(kernel, E, x, max(samples // 2, 8))
        err = abs(val - coarse)
    m = E.measure
    if kappa is None:
        kappa = almost_decreasing_kappa(kernel)
    lemma = kappa ** 2 * float(tail_mass(kernel, eta(m, d)))
    sharp = float(nu_sharp(kernel, m))
    return ExteriorMassReport(val, err, lemma, sharp, val - lemma, val - sharp, kappa)


def kernel_from_young(phi, p: float | None = None, d: int = 1, n: int = 1024) -> Kernel:
    """Recover the radial kernel whose critical function is ``phi``.

    Builds w^p(r) = 1 / phi_p^{-1}(1/r), differentiates g = w^p(r)/r in
    log-log coordinates and maps r to rho = eta(r).
    """
    p = phi.p if p is None else p
    if p is None:
        raise ValueError("exponent p required")
    t = phi.t
    rmin, rmax = 1.0 / float(phi(t[-1])), 1.0 / float(phi(t[0]))
    r = np.logspace(math.log10(rmin), math.log10(rmax), n)
    inv = phi.inverse(1.0 / r)
    g = (1.0 / inv) ** p / r
    lr, lg = np.log(r), np.log(g)
    slope = np.gradient(lg, lr)
    nu = -g * slope / r
    tol = 1e-9 * np.abs(g / r)
    if np.any(nu < -tol):
        i = int(np.nonzero(nu < -tol)[0][0])
        raise ValueError(f"negative kernel value at radius {float(eta(r[i], d)):.6g}")
    nu = np.maximum(nu, 0.0)
    rho = eta(r, d)
    return Kernel.tabulated(rho, nu, p=p, d=d, kind="tabulated",
                            params={"source": getattr(phi, "label", "phi")})
