"""Sampled functions on uniform grids and their local and nonlocal norms."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, signal
from scipy.special import gamma as gamma_fn

from .kernels import Kernel, SetSpec, sphere_area, unit_ball_volume
from .orlicz import NormResult

__all__ = [
    "GridFunction",
    "BBMReport",
    "nonlocal_seminorm",
    "direct_seminorm",
    "gradient_seminorm",
    "lebesgue_norm",
    "K_dp",
    "bbm_limit_check",
    "rearrange_function",
]

_GL_X, _GL_W = np.polynomial.legendre.leggauss(12)
_GL_X = 0.5 * (_GL_X + 1.0)
_GL_W = 0.5 * _GL_W
_GL2_X, _GL2_W = np.polynomial.legendre.leggauss(4)
_GL2_X = 0.5 * (_GL2_X + 1.0)
_GL2_W = 0.5 * _GL2_W


def _mean_abs_power(a, b, q: float):
    """Exact mean of |x|^q over a linear segment running from a to b."""
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    out = np.empty(np.broadcast(a, b).shape)
    aa, ab = np.abs(a), np.abs(b)
    opp = (a * b) < 0
    q1 = q + 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        out_opp = (aa ** q1 + ab ** q1) / (q1 * (aa + ab))
        lo, hi = np.minimum(aa, ab), np.maximum(aa, ab)
        gap = hi - lo
        out_same = (hi ** q1 - lo ** q1) / (q1 * gap)
        # nearly equal endpoints: expand around the midpoint
        mid = 0.5 * (hi + lo)
        near = gap <= 1e-6 * np.maximum(hi, 1e-300)
        taylor = mid ** q * (1.0 + q * (q - 1.0) / 24.0 * (gap / np.where(mid > 0, mid, 1.0)) ** 2)
    out = np.where(opp, out_opp, np.where(near, taylor, out_same))
    return np.where((aa == 0) & (ab == 0), 0.0, out)


def _above(a, b, s: float, strict: bool = True):
    """Fraction of a cell where the linear interpolant from a to b exceeds s."""
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    with np.errstate(divide="ignore", invalid="ignore"):
        frac = np.clip(np.where(hi > lo, (hi - s) / (hi - lo), 0.0), 0.0, 1.0)
    full = lo > s if strict else lo >= s
    none = hi <= s if strict else hi < s
    return np.where(full, 1.0, np.where(none, 0.0, frac))


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Function sampled on a uniform grid in one or two dimensions.

    ``kind='linear'`` interpolates nodal values (piecewise linear, bilinear in
    2-d); ``kind='constant'`` holds value ``values[i]`` on the cell
    ``[x_i, x_i + h)``.  Outside the grid the function is zero.
    """

    values: np.ndarray
    spacing: float
    origin: tuple = (0.0,)
    kind: str = "linear"
    label: str = "u"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.asarray(self.values, float)
        if v.ndim not in (1, 2):
            raise ValueError("only 1-d and 2-d grids are supported")
        if not np.all(np.isfinite(v)):
            raise ValueError("values must be finite")
        if self.spacing <= 0:
            raise ValueError("spacing must be positive")
        if self.kind not in ("linear", "constant"):
            raise ValueError("kind must be 'linear' or 'constant'")
        org = tuple(float(o) for o in np.atleast_1d(self.origin))
        if len(org) == 1 and v.ndim == 2:
            org = (org[0], org[0])
        if len(org) != v.ndim:
            raise ValueError("origin must have one entry per axis")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "origin", org)

    # construction -------------------------------------------------------

    @classmethod
    def from_callable(cls, f, lo, hi, n: int, kind: str = "linear", d: int = 1,
                      label: str = "u") -> GridFunction:
        """Sample ``f`` on n nodes (per axis) spanning [lo, hi]; cell midpoints for step kind."""
        h = (hi - lo) / (n - 1) if kind == "linear" else (hi - lo) / n
        x = lo + h * np.arange(n) + (0.5 * h if kind == "constant" else 0.0)
        if d == 1:
            vals = f(x)
        else:
            X, Y = np.meshgrid(x, x, indexing="ij")
            vals = f(X, Y)
        return cls(np.asarray(vals, float), h, (lo,) * d, kind, label)

    @classmethod
    def from_csv(cls, path) -> GridFunction:
        meta = {}
        with open(path) as fh:
            for line in fh:
                if not line.startswith("#"):
                    break
                for tok in line[1:].split():
                    if "=" in tok:
                        k, v = tok.split("=", 1)
                        meta[k] = v
        data = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
        kind = meta.get("kind", "linear")
        if meta.get("d", "1") == "1":
            x, u = data[:, 0], data[:, 1]
            h = float(meta["spacing"]) if "spacing" in meta else float(np.mean(np.diff(x)))
            org = float(meta["origin"]) if "origin" in meta else float(x[0])
            return cls(u, h, (org,), kind, str(path))
        org = tuple(float(o) for o in meta["origin"].split(","))
        return cls(data, float(meta["spacing"]), org, kind, str(path))

    def to_csv(self, path) -> None:
        org = ",".join(repr(o) for o in self.origin)
        head = f"d={self.dimension} kind={self.kind} spacing={self.spacing!r} origin={org}"
        if self.dimension == 1:
            np.savetxt(path, np.column_stack([self.nodes, self.values]), delimiter=",",
                       header=head + "\nx,u", comments="# ", fmt="%.17g")
        else:
            np.savetxt(path, self.values, delimiter=",", header=head, comments="# ", fmt="%.17g")

    def with_values(self, values, **kw) -> GridFunction:
        args = dict(values=values, spacing=self.spacing, origin=self.origin, kind=self.kind,
                    label=self.label, meta=dict(self.meta))
        args.update(kw)
        return GridFunction(**args)

    def __mul__(self, c: float) -> GridFunction:
        return self.with_values(self.values * c)

    __rmul__ = __mul__

    def __abs__(self) -> GridFunction:
        return self.with_values(np.abs(self.values))

    def dilate(self, lam: float) -> GridFunction:
        """x -> u(lam x), realised by rescaling the grid."""
        return self.with_values(self.values, spacing=self.spacing / lam,
                                origin=tuple(o / lam for o in self.origin))

    # geometry -----------------------------------------------------------

    @property
    def dimension(self) -> int:
        return self.values.ndim

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def nodes(self) -> np.ndarray:
        """Node coordinates along the first axis."""
        return self.origin[0] + self.spacing * np.arange(self.values.shape[0])

    @property
    def cell_measure(self) -> float:
        return self.spacing ** self.dimension

    @property
    def compact(self) -> bool:
        """Whether the zero extension is continuous (linear kind) at the box edge."""
        if self.kind == "constant":
            return True
        v = self.values
        if v.ndim == 1:
            return v[0] == 0 and v[-1] == 0
        return bool(np.all(v[0] == 0) and np.all(v[-1] == 0) and np.all(v[:, 0] == 0)
                    and np.all(v[:, -1] == 0))

    @property
    def sup(self) -> float:
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0

    @property
    def extent(self) -> float:
        """Side length of the box carrying the function."""
        if self.kind == "linear":
            return self.spacing * (self.n - 1)
        return self.spacing * self.n

    # integration --------------------------------------------------------

    def quadrature(self):
        """Nodes and weights with int F(u) ~ sum w F(values) for any F(0)=0.

        Step functions are exact; in 1-d each linear cell is split at sign
        changes and integrated by 12-point Gauss-Legendre.
        """
        v = self.values
        h = self.spacing
        if self.kind == "constant":
            return v.ravel(), np.full(v.size, self.cell_measure)
        if self.dimension == 1:
            a, b = v[:-1], v[1:]
            live = (a != 0) | (b != 0)
            a, b = a[live], b[live]
            opp = (a * b) < 0
            frac = np.where(opp, np.abs(a) / np.where(opp, np.abs(a) + np.abs(b), 1.0), 1.0)
            # piece 1: [0, frac] from a to the crossing (or b when none)
            end1 = np.where(opp, 0.0, b)
            vals1 = a[:, None] + (end1 - a)[:, None] * _GL_X[None, :]
            w1 = (h * frac)[:, None] * _GL_W[None, :]
            vals2 = (b[opp])[:, None] * _GL_X[None, :]
            w2 = (h * (1 - frac[opp]))[:, None] * _GL_W[None, :]
            return (np.concatenate([vals1.ravel(), vals2.ravel()]),
                    np.concatenate([w1.ravel(), w2.ravel()]))
        c00, c10, c01, c11 = v[:-1, :-1], v[1:, :-1], v[:-1, 1:], v[1:, 1:]
        X, Y = np.meshgrid(_GL2_X, _GL2_X, indexing="ij")
        W = np.outer(_GL2_W, _GL2_W) * h * h
        vals = (c00[..., None, None] * (1 - X) * (1 - Y) + c10[..., None, None] * X * (1 - Y)
                + c01[..., None, None] * (1 - X) * Y + c11[..., None, None] * X * Y)
        ww = np.broadcast_to(W, vals.shape)
        return vals.ravel(), ww.ravel()

    def level_measure(self, s: float, strict: bool = True) -> float:
        """|{|u| > s}| (or >= s when ``strict`` is False), s >= 0.

        {|u| >= 0} is the whole space, so that case returns inf.
        """
        if not strict and s <= 0:
            return math.inf
        v = np.abs(self.values)
        if self.kind == "constant" or self.dimension == 2:
            cnt = np.count_nonzero(v > s) if strict else np.count_nonzero(v >= s)
            return float(cnt) * self.cell_measure
        a, b = self.values[:-1], self.values[1:]
        # |u| > s splits into u > s and -u > s, disjoint for s >= 0
        return float(np.sum(_above(a, b, s, strict) + _above(-a, -b, s, strict))) * self.spacing

    def support_measure(self) -> float:
        return self.level_measure(0.0)

    def mean(self, omega: SetSpec | None = None) -> float:
        v, w = self.restricted_quadrature(omega)
        return float(np.sum(v * w) / np.sum(w))

    def restricted_quadrature(self, omega: SetSpec | None):
        """Quadrature over Omega (1-d, cells inside Omega) or the whole box."""
        if omega is None:
            if self.kind == "constant":
                return self.values.ravel(), np.full(self.values.size, self.cell_measure)
            vals, w = self.quadrature()
            return vals, w
        mask = self._cell_mask(omega)
        v = self.values
        if self.kind == "constant":
            return v[mask], np.full(int(mask.sum()), self.spacing)
        a, b = v[:-1][mask], v[1:][mask]
        vals = a[:, None] + (b - a)[:, None] * _GL_X[None, :]
        w = self.spacing * np.broadcast_to(_GL_W, vals.shape)
        return vals.ravel(), w.ravel()

    def _cell_mask(self, omega: SetSpec) -> np.ndarray:
        if self.dimension != 1 or omega.dimension != 1:
            raise NotImplementedError("restricted quadrature is implemented in 1-d")
        x = self.nodes
        h = self.spacing
        if self.kind == "linear":
            lo, hi = x[:-1], x[1:]
        else:
            lo, hi = x, x + h
        tol = 1e-9 * h
        return np.array([_cell_in(omega, a, b, tol) for a, b in zip(lo, hi)], dtype=bool)


def _cell_in(omega: SetSpec, lo: float, hi: float, tol: float) -> bool:
    for box in omega.boxes:
        (a,), (b,) = box
        if lo >= a - tol and hi <= b + tol:
            return True
    for (c,), r in omega.balls:
        if lo >= c - r - tol and hi <= c + r + tol:
            return True
    return False


# Lebesgue and gradient norms ---------------------------------------------


def lebesgue_norm(u: GridFunction, q: float, omega: SetSpec | None = None) -> float:
    """||u||_q, exact for step functions and 1-d piecewise-linear functions."""
    if q <= 0:
        raise ValueError("q must be positive")
    v = u.values
    if u.kind == "constant" and omega is None:
        return float((np.sum(np.abs(v) ** q) * u.cell_measure) ** (1.0 / q))
    if u.dimension == 1 and u.kind == "linear":
        a, b = v[:-1], v[1:]
        m = _mean_abs_power(a, b, q)
        if omega is not None:
            m = m[u._cell_mask(omega)]
        return float((np.sum(m) * u.spacing) ** (1.0 / q))
    vals, w = u.restricted_quadrature(omega)
    return float(np.sum(w * np.abs(vals) ** q) ** (1.0 / q))


def _grad_pp(u: GridFunction, p: float) -> float:
    """||grad u||_p^p; inf for functions with jumps."""
    v = u.values
    h = u.spacing
    if u.kind == "constant":
        return 0.0 if not np.any(v) else math.inf
    if not u.compact:
        return math.inf
    if u.dimension == 1:
        return float(np.sum(np.abs(np.diff(v) / h) ** p) * h)
    gx, gy = np.gradient(v, h)
    return float(np.sum((gx * gx + gy * gy) ** (p / 2)) * h * h)


def gradient_seminorm(u: GridFunction, p: float) -> float:
    """||grad u||_p (difference quotients; inf when u jumps)."""
    g = _grad_pp(u, p)
    return g ** (1.0 / p) if math.isfinite(g) else math.inf


def K_dp(d: int, p: float, method: str = "closed") -> float:
    """Average of |w . e|^p over the unit sphere of R^d."""
    if d < 1:
        raise ValueError("d must be >= 1")
    if d == 1:
        return 1.0
    if method == "closed":
        return float(gamma_fn(d / 2) * gamma_fn((p + 1) / 2)
                     / (math.sqrt(math.pi) * gamma_fn((d + p) / 2)))
    # latitude density on S^{d-1}: proportional to sin^{d-2}
    num = integrate.quad(lambda a: abs(math.cos(a)) ** p * math.sin(a) ** (d - 2), 0, math.pi)[0]
    den = integrate.quad(lambda a: math.sin(a) ** (d - 2), 0, math.pi)[0]
    return num / den


# nonlocal seminorm ---------------------------------------------------------


def _shift_profile_1d(u: GridFunction, p: float, mask: np.ndarray | None = None) -> np.ndarray:
    """D(m h) = int |u(x + m h) - u(x)|^p dx for m = 0..M, exact on the grid.

    With ``mask`` only cells with both the cell and its shift inside the mask
    contribute.
    """
    v = u.values
    h = u.spacing
    n = v.size
    M = n
    out = np.zeros(M + 1)
    if u.kind == "constant":
        pad = np.concatenate([v, np.zeros(n)])
        cm = None if mask is None else np.concatenate([mask, np.zeros(n, bool)])
        for m in range(1, M + 1):
            e = pad[m:m + n] - v
            if cm is None:
                # cells left of the box, where only the shifted copy is nonzero
                out[m] = (np.sum(np.abs(e) ** p) + np.sum(np.abs(v[:m]) ** p)) * h
            else:
                keep = mask & cm[m:m + n]
                out[m] = np.sum(np.abs(e[keep]) ** p) * h
        return out
    if mask is None and p == 2.0:
        r = signal.correlate(v, v, mode="full", method="direct")[n - 1:]
        r = np.concatenate([r, np.zeros(3)])
        rm1 = np.concatenate([[r[1]], r[:-1]])
        m = np.arange(M + 1)
        R = h * ((2.0 / 3.0) * r[m] + (1.0 / 6.0) * (r[m + 1] + rm1[m]))
        out = 2.0 * R[0] - 2.0 * R
        out[0] = 0.0
        return np.maximum(out, 0.0)
    pad = np.concatenate([v, np.zeros(n + 1)])
    ncell = n - 1
    cm = None if mask is None else np.concatenate([mask, np.zeros(n + 1, bool)])
    for m in range(1, M + 1):
        if cm is None:
            # nodes i = -m .. n-1 cover every x where either copy is nonzero
            ext = np.concatenate([np.zeros(m), v, np.zeros(m)])
            e = ext[m:] - ext[:n + m]
            out[m] = np.sum(_mean_abs_power(e[:-1], e[1:], p)) * h
        else:
            keep = mask & cm[m:m + ncell]
            e = pad[m:m + n] - v
            out[m] = np.sum(_mean_abs_power(e[:-1], e[1:], p)[keep]) * h
    return out


def _shift_profile_2d(u: GridFunction, p: float) -> np.ndarray:
    """Lattice D(m h) on [-n, n]^2 by nodal sums."""
    v = u.values
    h2 = u.cell_measure
    if p == 2.0:
        s0 = np.sum(v * v)
        r = signal.correlate(v, v, mode="full", method="fft")
        return np.maximum(2.0 * s0 - 2.0 * r, 0.0) * h2
    n0, n1 = v.shape
    P = np.zeros((n0 + 2 * n0, n1 + 2 * n1))
    P[n0:2 * n0, n1:2 * n1] = v
    out = np.zeros((2 * n0 - 1, 2 * n1 - 1))
    base_sum = np.sum(np.abs(v) ** p)
    for i in range(-(n0 - 1), n0):
        for j in range(-(n1 - 1), n1):
            sh = P[n0 + i:2 * n0 + i, n1 + j:2 * n1 + j]
            inner = np.sum(np.abs(sh - v) ** p)
            # mass of the shifted copy falling outside the original box
            outside = base_sum - np.sum(np.abs(sh) ** p)
            out[i + n0 - 1, j + n1 - 1] = (inner + outside) * h2
    return out


def _radial_average_2d(D: np.ndarray, h: float, fill: float, nr: int, nang: int = 256):
    """Angular mean of the lattice profile at radii m h, m = 0..nr."""
    c0 = (D.shape[0] - 1) // 2
    c1 = (D.shape[1] - 1) // 2
    ang = (np.arange(nang) + 0.5) * (2 * math.pi / nang)
    rad = np.arange(nr + 1)
    X = c0 + rad[:, None] * np.cos(ang)[None, :]
    Y = c1 + rad[:, None] * np.sin(ang)[None, :]
    i0 = np.floor(X).astype(int)
    j0 = np.floor(Y).astype(int)
    fx, fy = X - i0, Y - j0
    big = np.full((D.shape[0] + 2, D.shape[1] + 2), fill)
    big[:-2, :-2] = D
    ok = (i0 >= 0) & (j0 >= 0) & (i0 < D.shape[0] - 1) & (j0 < D.shape[1] - 1)
    i0c = np.clip(i0, 0, D.shape[0])
    j0c = np.clip(j0, 0, D.shape[1])
    val = (big[i0c, j0c] * (1 - fx) * (1 - fy) + big[i0c + 1, j0c] * fx * (1 - fy)
           + big[i0c, j0c + 1] * (1 - fx) * fy + big[i0c + 1, j0c + 1] * fx * fy)
    val = np.where(ok, val, fill)
    return val.mean(axis=1)


def _lin_moment(kernel: Kernel, a, b):
    """int_a^b (rho - a) rho^{d-1} nu(rho) drho, finite even when nu is singular at a = 0."""
    a = np.asarray(a, float)
    m1 = kernel.radial_moment(a, b, 1.0)
    pos = a > 0
    if not np.any(pos):
        return m1
    m0 = kernel.radial_moment(np.where(pos, a, 1.0), np.where(pos, b, 1.0), 0.0)
    return np.where(pos, m1 - np.where(pos, a, 0.0) * m0, m1)


def _product_integral(D: np.ndarray, h: float, kernel: Kernel, p: float, g0: float | None,
                      delta_cells: int, stride: int = 1) -> float:
    """sphere_area * int D(rho) nu(rho) rho^{d-1} drho over [0, len(D)-1) h.

    D is interpolated linearly between samples.  Over the first
    ``delta_cells`` cells the quotient D / rho^p is interpolated instead,
    anchored at g0 for rho = 0, which captures the rho^p behaviour of smooth
    functions at the singularity.
    """
    D = D[::stride]
    hh = h * stride
    M = D.size - 1
    rho = hh * np.arange(M + 1)
    a, b = rho[:-1], rho[1:]
    k = max(0, min(delta_cells // stride, M)) if g0 is not None else 0
    total = 0.0
    if k > 0:
        with np.errstate(divide="ignore", invalid="ignore"):
            g = np.where(rho[:k + 1] > 0, D[:k + 1] / rho[:k + 1] ** p, 0.0)
        g[0] = g0
        aa, bb = a[:k], b[:k]
        mp = kernel.radial_moment(aa, bb, p)
        mp1 = kernel.radial_moment(aa, bb, p + 1.0)
        slope = (g[1:] - g[:-1]) / hh
        total += float(np.sum(g[:-1] * mp + slope * (mp1 - aa * mp)))
    aa, bb = a[k:], b[k:]
    live = D[k:-1] != 0
    # D vanishes at rho = 0, where the zeroth moment may diverge
    m0 = kernel.radial_moment(np.where(live, aa, bb), bb, 0.0)
    slope = (D[k + 1:] - D[k:-1]) / hh
    total += float(np.sum(D[k:-1] * m0 + slope * _lin_moment(kernel, aa, bb)))
    return sphere_area(kernel.d) * total


def nonlocal_seminorm(u: GridFunction, kernel: Kernel, domain: SetSpec | None = None,
                      delta_cells: int = 4, return_profile: bool = False):
    """|u|^p = double integral of |u(x) - u(y)|^p nu(x - y).

    Uses the difference form int nu(h) D(h) dh with D(h) = int |u(x+h) - u(x)|^p dx
    computed exactly on the lattice h = m * spacing, then integrated against
    the kernel's analytic moments.  Beyond the box length D equals 2||u||_p^p
    and contributes 2||u||_p^p times the tail mass.  ``domain`` restricts both
    variables to Omega (1-d).  The error estimate is the change when every
    other lattice sample is dropped.
    """
    p = kernel.p
    if u.dimension != kernel.d:
        raise ValueError("kernel and function dimensions differ")
    if not np.any(u.values):
        return NormResult(0.0, 0.0, 0)
    h = u.spacing
    if u.dimension == 1:
        mask = None if domain is None else u._cell_mask(domain)
        if domain is None and not u.compact:
            raise ValueError("linear-kind function with nonzero edge values; pad with zeros")
        D = _shift_profile_1d(u, p, mask)
        if u.kind == "linear":
            if domain is None:
                g0 = _grad_pp(u, p)
            else:
                g0 = float(np.sum(np.abs(np.diff(u.values) / h)[mask] ** p) * h)
        else:
            g0 = None
        full = 2.0 * lebesgue_norm(u, p) ** p if domain is None else 0.0
    else:
        if domain is not None:
            raise NotImplementedError("restricted seminorm is implemented in 1-d")
        Dl = _shift_profile_2d(u, p)
        full = 2.0 * np.sum(np.abs(u.values) ** p) * u.cell_measure
        nr = int(math.ceil(math.sqrt(2) * max(u.values.shape)))
        D = _radial_average_2d(Dl, h, full, nr)
        g0 = K_dp(2, p) * _grad_pp(u, p) if u.kind == "linear" else None
    L = h * (D.size - 1)
    fine = _product_integral(D, h, kernel, p, g0, delta_cells)
    # D is constant past the last sample, so padding keeps the coarse grid aligned
    Dc = D if D.size % 2 == 1 else np.append(D, D[-1])
    coarse = _product_integral(Dc, h, kernel, p, g0, delta_cells, stride=2)
    Lc = h * (Dc.size - 1)
    tail = 0.0
    if full > 0:
        tail = full * sphere_area(kernel.d) * float(kernel.radial_moment(L, np.inf, 0.0))
        coarse += full * sphere_area(kernel.d) * float(kernel.radial_moment(Lc, np.inf, 0.0))
    value = fine + tail
    err = abs(value - coarse)
    flagged = err > 1e-3 * max(abs(value), 1e-300)
    res = NormResult(value, err, D.size, flagged,
                     "refinement change above 1e-3" if flagged else "")
    if return_profile:
        return res, D
    return res


def direct_seminorm(u: GridFunction, kernel: Kernel, pad: int | None = None) -> float:
    """Independent double-sum oracle for 1-d step functions on coarse grids.

    Cell pairs (i, j) contribute |v_i - v_j|^p times the exact integral of nu
    over the pair of cells; cells outside the box carry zero.
    """
    if u.dimension != 1 or u.kind != "constant":
        raise ValueError("direct oracle handles 1-d step functions")
    p = kernel.p
    h = u.spacing
    v = u.values
    n = v.size
    total = 0.0

    def pair_mass(m):
        # int over x in [0,h], y in [mh, mh+h] of nu(y - x): triangle weight on |r|
        if m == 0:
            return 0.0  # diagonal pairs carry |v_i - v_i| = 0
        a = (m - 1) * h
        b = m * h
        c = (m + 1) * h
        up = _lin_moment(kernel, a, b)
        down = h * kernel.radial_moment(b, c, 0.0) - _lin_moment(kernel, b, c)
        return float(up + down)

    weights = np.array([pair_mass(m) for m in range(n)])
    idx = np.arange(n)
    for i in range(n):
        diff = np.abs(v[i] - v) ** p
        # equal values contribute 0 even where the pair mass is infinite (sp >= 1)
        live = diff > 0
        total += float(np.sum(diff[live] * weights[np.abs(idx - i)][live]))
    # pairs with one point outside the box, counted in both orders
    for i in range(n):
        x0 = i * h
        # int_{cell i} int_{y outside [0, nh]} nu(y - x) dy dx
        left = _outer_cell_mass(kernel, x0, h)
        right = _outer_cell_mass(kernel, (n - 1 - i) * h, h)
        if v[i] != 0:
            total += 2.0 * abs(v[i]) ** p * (left + right)
    return total


def _outer_cell_mass(kernel: Kernel, dist: float, h: float) -> float:
    """int_0^h int_{r > dist + x} nu(r) dr dx (one side, 1-d)."""
    a, b = dist, dist + h
    # = int_a^b nu(r)(r - a) dr + h * int_b^inf nu
    return float(_lin_moment(kernel, a, b) + h * kernel.radial_moment(b, np.inf, 0.0))


# BBM limit ------------------------------------------------------------------


@dataclass
class BBMReport:
    s: list
    seminorms: list
    target: float
    ratios: list
    monotone: bool
    within: float
    passed: bool

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def bbm_limit_check(u: GridFunction, p: float = 2.0, s_list=(0.90, 0.95, 0.99),
                    tol: float = 0.10) -> BBMReport:
    """Weighted seminorms s(1-s)|u|^p_{W^{s,p}} against (|S^{d-1}|/p) K_{d,p} ||grad u||_p^p."""
    if u.kind != "linear" or not u.compact:
        raise ValueError("the limit needs a continuous piecewise-linear or smooth function")
    d = u.dimension
    s_list = [float(s) for s in s_list]
    if any(b <= a for a, b in zip(s_list, s_list[1:])):
        raise ValueError("s_list must increase")
    target = sphere_area(d) / p * K_dp(d, p) * _grad_pp(u, p)
    sem = [nonlocal_seminorm(u, Kernel.fractional(s, p, d, scale=s * (1 - s))).value
           for s in s_list]
    if target == 0:
        ratios = [1.0 for _ in s_list]
    else:
        ratios = [v / target for v in sem]
    gaps = [abs(r - 1.0) for r in ratios]
    monotone = all(b <= a for a, b in zip(gaps, gaps[1:]))
    within = gaps[-1]
    return BBMReport(s_list, sem, target, ratios, monotone, within, monotone and within <= tol)


# rearrangement -----------------------------------------------------------------


def _rearrange_linear_1d(u: GridFunction) -> GridFunction:
    # the distribution of a piecewise-linear |u| is piecewise linear in the
    # level with breaks at the node values, so u* interpolates the points
    # (mu(c)/2, c); a plateau at c contributes a jump from mu(c) to mu(c-)
    levels = np.unique(np.abs(u.values))
    pts_m, pts_v = [0.0], [float(levels[-1])]
    for c in levels[::-1]:
        above = u.level_measure(c)
        at = above if c == 0 else u.level_measure(c, strict=False)
        pts_m += [above, at]
        pts_v += [float(c), float(c)]
    m = np.asarray(pts_m) / 2
    v = np.asarray(pts_v)
    keep = np.concatenate([[True], np.diff(m) > 0])
    m, v = m[keep], v[keep]
    hh = u.spacing / 2
    half = int(math.ceil(m[-1] / hh)) + 1
    x = hh * np.arange(-half, half + 1)
    vals = np.interp(np.abs(x), m, v, right=0.0)
    return GridFunction(vals, hh, (-half * hh,), "linear", f"{u.label}*")


def rearrange_function(u: GridFunction) -> GridFunction:
    """Symmetric decreasing rearrangement of |u| on a grid centred at 0.

    1-d step functions are rearranged exactly on half the spacing.  1-d
    linear functions are rebuilt from their exact distribution function on
    half the spacing, so level sets agree to within one original cell.  In
    2-d the sorted cell (or node) values are assigned to cells (nodes) in
    order of distance from the origin, which preserves the counted
    distribution exactly.
    """
    v = np.sort(np.abs(u.values).ravel())[::-1]
    h = u.spacing
    if u.dimension == 1:
        if u.kind == "linear":
            return _rearrange_linear_1d(u)
        vals = np.concatenate([v[::-1], v])
        hh = h / 2
        return GridFunction(vals, hh, (-v.size * hh,), "constant", f"{u.label}*")
    v = v[v > 0]
    half = int(math.ceil(math.sqrt(v.size / math.pi))) + 3
    ax = h * (np.arange(2 * half + 1) - half)
    X, Y = np.meshgrid(ax, ax, indexing="ij")
    order = np.argsort((X * X + Y * Y).ravel(), kind="stable")
    vals = np.zeros(X.size)
    vals[order[:v.size]] = v
    # step cells are centred on the nodes
    org = float(ax[0]) - (0.5 * h if u.kind == "constant" else 0.0)
    return GridFunction(vals.reshape(X.shape), h, (org, org), u.kind, f"{u.label}*")
