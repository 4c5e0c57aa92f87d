"""Dyadic level-set decomposition and the discrete inequalities behind the
Gagliardo-Nirenberg-Sobolev bound, as checkable certificates."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kernels import TailProfile
from .young import YoungFunction

__all__ = [
    "DyadicDecomposition",
    "LemmaReport",
    "dyadic_decompose",
    "c_p",
    "proof_lower_bound",
    "orlicz_upper_bound",
    "lemma_gene_convex_check",
    "lemma_young_discrete_check",
]


def c_p(t: float, p: float) -> float:
    """(t^p - 2) / (t^p - 1)."""
    tp = t ** p
    return (tp - 2.0) / (tp - 1.0)


@dataclass(frozen=True, eq=False)
class DyadicDecomposition:
    """a_k = |{u > t^k}| and d_k = a_k - a_{k+1} for k in [k_min, k_max].

    ``a`` has one extra trailing entry a_{k_max+1}; ``residual`` is the
    measure of {0 < u <= t^{k_min}}, the part below the window.
    """

    t: float
    k_min: int
    k_max: int
    a: np.ndarray
    residual: float
    source: object = None

    @property
    def ks(self) -> np.ndarray:
        return np.arange(self.k_min, self.k_max + 1)

    @property
    def d(self) -> np.ndarray:
        return self.a[:-1] - self.a[1:]

    def a_at(self, k: int) -> float:
        if k > self.k_max + 1:
            return 0.0
        if k < self.k_min:
            raise IndexError("index below the window")
        return float(self.a[k - self.k_min])

    @property
    def empty(self) -> bool:
        return not np.any(self.a) and self.residual == 0.0


def dyadic_decompose(u, t: float = 2.0, depth: int = 60) -> DyadicDecomposition:
    """Level measures of u at t^k, k_max = ceil(log_t sup u), k_min = k_max - depth."""
    if t < 2:
        raise ValueError("base t must be at least 2")
    t = float(t)
    vals = np.asarray(u.values)
    if np.any(vals < 0):
        raise ValueError("negative values; decompose |u| instead")
    sup = float(vals.max()) if vals.size else 0.0
    if sup == 0.0:
        return DyadicDecomposition(t, 0, 0, np.zeros(2), 0.0, u)
    k_max = int(math.ceil(math.log(sup) / math.log(t)))
    while t ** k_max < sup:
        k_max += 1
    while t ** (k_max - 1) >= sup:
        k_max -= 1
    k_min = k_max - depth
    a = np.array([u.level_measure(t ** k) for k in range(k_min, k_max + 2)])
    residual = u.level_measure(0.0) - a[0]
    return DyadicDecomposition(t, k_min, k_max, a, max(residual, 0.0), u)


def proof_lower_bound(dec: DyadicDecomposition, w: TailProfile, kappa: float = 1.0,
                      p: float | None = None) -> float:
    """2 kappa^2 C_p(t) sum_k t^{pk} (a_{k+1}/a_k) w^p(a_k); terms with a_k = 0 vanish."""
    p = w.p if p is None else p
    t = float(dec.t)
    a = dec.a
    live = a[:-1] > 0
    if not live.any():
        return 0.0
    k = dec.ks[live]
    ak, ak1 = a[:-1][live], a[1:][live]
    terms = t ** (p * k) * (ak1 / ak) * w.wp(ak)
    return float(2.0 * kappa ** 2 * c_p(t, p) * math.fsum(terms))


def orlicz_upper_bound(dec: DyadicDecomposition, phi: YoungFunction, p: float | None = None,
                       include_residual: bool = True) -> float:
    """t^p sum_k t^{pk} (1/phi^{-1}(1/d_k))^p; terms with d_k = 0 vanish.

    The set {0 < u <= t^{k_min}} below the window enters as the block of
    index k_min - 1, on which u <= t^{k_min}.
    """
    p = phi.p if p is None else p
    t = float(dec.t)
    d = dec.d
    ks = dec.ks
    if include_residual and dec.residual > 0:
        d = np.concatenate([[dec.residual], d])
        ks = np.concatenate([[dec.k_min - 1], ks])
    live = d > 0
    if not live.any():
        return 0.0
    inv = phi.inverse(1.0 / d[live])
    terms = t ** (p * ks[live]) * (1.0 / inv) ** p
    return float(t ** p * math.fsum(terms))


@dataclass(frozen=True)
class LemmaReport:
    name: str
    lhs: float
    rhs: float
    passed: bool
    vacuous: bool = False

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs


def _sequence(a, k0: int):
    a = np.asarray(a, float)
    if np.any(a < 0):
        raise ValueError("sequence must be nonnegative")
    return a, k0 + np.arange(a.size)


def _left_tail(T: float, k0: int):
    """sum_{k < k0} T^k, or inf when it diverges."""
    return T ** k0 / (T - 1.0) if T > 1 else math.inf


def lemma_gene_convex_check(a, phi: YoungFunction, p: float, theta: float, T: float,
                            k0: int = 0, rtol: float = 1e-12) -> LemmaReport:
    """Both sides of the discrete convexity inequality for a nonincreasing a.

    a_k = a[k - k0] on the window, zero after it and a[0] for every k < k0,
    the only way a finite window extends to a nonincreasing sequence on Z
    without inventing values.
    """
    a, ks = _sequence(a, k0)
    if np.any(np.diff(a) > 0):
        raise ValueError("sequence must be nonincreasing")
    nxt = np.append(a[1:], 0.0)
    live = a > 0
    wp = np.zeros_like(a)
    with np.errstate(over="ignore"):  # subnormal a_k: 1/a_k = inf gives w^p = 0, its limit
        wp[live] = (1.0 / phi.inverse(1.0 / a[live])) ** p
    factor = float(phi.phi_p(theta ** p / T, p))
    lhs = math.fsum(wp * T ** ks)
    rhs = math.fsum(np.where(live, nxt / np.where(live, a, 1.0), 0.0) * wp * T ** ks)
    if a[0] > 0:
        tail = _left_tail(T, k0) * wp[0]
        if not math.isfinite(tail):
            return LemmaReport("gene-convex", math.inf, math.inf, True, vacuous=True)
        lhs += tail
        rhs += tail
    lhs *= factor
    return LemmaReport("gene-convex", float(lhs), float(rhs), bool(lhs <= rhs * (1 + rtol)))


def lemma_young_discrete_check(a, q: float, T: float, k0: int = 0,
                               rtol: float = 1e-12) -> LemmaReport:
    """sum a_k^{1/q} T^k <= T^q sum (a_{k+1}/a_k) a_k^{1/q} T^k with zero terms dropped.

    The window is extended as in lemma_gene_convex_check.
    """
    if q < 1:
        raise ValueError("q must be at least 1")
    a, ks = _sequence(a, k0)
    live = a > 0
    if np.any(~live[:-1] & live[1:]):
        raise ValueError("support must be monotone: a_k = 0 forces a_{k+1} = 0")
    nxt = np.append(a[1:], 0.0)
    root = np.where(live, a, 0.0) ** (1.0 / q)
    lhs = math.fsum(root * T ** ks)
    rhs = math.fsum(np.where(live, nxt / np.where(live, a, 1.0), 0.0) * root * T ** ks)
    if a[0] > 0:
        tail = _left_tail(T, k0) * a[0] ** (1.0 / q)
        if not math.isfinite(tail):
            return LemmaReport("young-discrete", math.inf, math.inf, True, vacuous=True)
        lhs += tail
        rhs += tail
    rhs *= T ** q
    return LemmaReport("young-discrete", float(lhs), float(rhs), bool(lhs <= rhs * (1 + rtol)))
