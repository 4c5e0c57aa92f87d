"""Modulars and Luxemburg norms of sampled functions."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .young import YoungFunction, _crossings, check_convexity_phi_p, combine

__all__ = [
    "NormResult",
    "OrliczError",
    "EmbeddingError",
    "QuadratureSample",
    "modular",
    "luxemburg_norm",
    "indicator_norm",
    "power_rescale_norm",
    "embedding_bound",
    "sum_space_norm",
    "orlicz_norm_bounds",
]


class OrliczError(ValueError):
    """Norm computation refused or the search bracket is misconfigured."""


class EmbeddingError(ValueError):
    def __init__(self, message: str, witness: float):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class NormResult:
    value: float
    error_estimate: float = 0.0
    iterations: int = 0
    flagged: bool = False
    notes: str = ""

    def __float__(self) -> float:
        return float(self.value)


@dataclass(frozen=True)
class QuadratureSample:
    """Values of |u| at quadrature nodes with their weights."""

    values: np.ndarray
    weights: np.ndarray

    def quadrature(self):
        return self.values, self.weights

    def split(self, mask):
        return (QuadratureSample(np.where(mask, self.values, 0.0), self.weights),
                QuadratureSample(np.where(mask, 0.0, self.values), self.weights))


def _sample(u):
    v, w = u.quadrature()
    return np.abs(np.asarray(v, float)), np.asarray(w, float)


def modular(u, phi: YoungFunction, lam: float) -> float:
    """int phi(|u| / lam); +inf on overflow."""
    if lam <= 0:
        raise ValueError("lambda must be positive")
    v, w = _sample(u)
    nz = v > 0
    if not nz.any():
        return 0.0
    with np.errstate(over="ignore", invalid="ignore"):
        val = float(np.sum(w[nz] * phi(v[nz] / lam)))
    return val if np.isfinite(val) else math.inf


def luxemburg_norm(u, phi: YoungFunction, rtol: float = 1e-13,
                   allow_nonconvex: bool = False) -> NormResult:
    """inf{lam > 0 : int phi(|u|/lam) <= 1}.

    Root finding runs on log(lam); the root is then nudged upward until the
    modular is at most 1, so the returned gauge is feasible.
    """
    if "possibly-nonconvex" in phi.flags and not allow_nonconvex:
        raise OrliczError("phi may be nonconvex; use its minorant")
    v, w = _sample(u)
    nz = v > 0
    if not nz.any():
        return NormResult(0.0, 0.0, 0)
    sup = float(v.max())
    meas = float(w[nz].sum())
    eps = float(w[nz].min())
    lo = sup / float(phi.inverse(1.0 / eps)) / 10.0
    hi = sup / float(phi.inverse(1.0 / meas)) * 10.0
    f = lambda x: modular(u, phi, math.exp(x)) - 1.0  # noqa: E731
    it = 0
    while f(math.log(hi)) > 0:
        hi *= 10.0
        it += 1
        if it > 60:
            raise OrliczError("modular never drops to 1 on the search range")
    while f(math.log(lo)) <= 0:
        if lo < 1e-300:
            raise OrliczError("modular never exceeds 1 on the search range")
        lo /= 10.0
    x, res = brentq(f, math.log(lo), math.log(hi), xtol=1e-15, rtol=4 * np.finfo(float).eps,
                    full_output=True)
    lam = math.exp(x)
    step = 1e-15
    while modular(u, phi, lam) > 1.0:
        lam *= 1 + step
        step *= 2
    return NormResult(lam, lam * max(rtol, step), res.iterations)


def indicator_norm(phi: YoungFunction, measure: float) -> float:
    """1 / phi^{-1}(1/|E|)."""
    if measure <= 0:
        raise ValueError("measure must be positive")
    return float(1.0 / phi.inverse(1.0 / measure))


@dataclass(frozen=True)
class RescaleCheck:
    lhs: float
    rhs: float

    @property
    def rel_error(self) -> float:
        return abs(self.lhs - self.rhs) / max(abs(self.rhs), 1e-300)


def power_rescale_norm(u, psi: YoungFunction, q: float) -> RescaleCheck:
    """Both sides of ||u||_{psi(t^q)} = || |u|^q ||_psi^{1/q}."""
    if q <= 0:
        raise ValueError("q must be positive")
    fn = lambda x: psi(np.asarray(x, float) ** q)  # noqa: E731
    inv = lambda y: psi.inverse(y) ** (1.0 / q)  # noqa: E731
    g = psi.t ** (1.0 / q)
    bar = YoungFunction(g, fn(g), psi.exp0 * q, psi.exp_inf * q, fn=fn, inv=inv,
                        grid=g, label=f"{psi.label}(t^{q:g})")
    conv = check_convexity_phi_p(bar, 1.0)
    if not conv.passed:
        raise OrliczError(f"psi(t^q) is not convex near {conv.witness}")
    v, w = _sample(u)
    lhs = luxemburg_norm(QuadratureSample(v, w), bar).value
    rhs = luxemburg_norm(QuadratureSample(v ** q, w), psi).value ** (1.0 / q)
    return RescaleCheck(lhs, rhs)


def embedding_bound(phi1: YoungFunction, phi2: YoungFunction, c: float, t0: float,
                    domain_measure: float = math.inf) -> float:
    """Constant cT of ||u||_{phi1} <= cT ||u||_{phi2} on a domain of the given measure.

    T = phi1(t0)|D| + 1 for finite measure, T = 1 otherwise; the domination
    phi1(t) <= phi2(ct) is checked on the union of both sample grids.
    """
    t = np.unique(np.concatenate([phi1.t, phi2.t]))
    if math.isfinite(domain_measure):
        t = t[t >= t0]
        T = float(phi1(t0)) * domain_measure + 1.0
    else:
        T = 1.0
    lhs, rhs = phi1(t), phi2(c * t)
    bad = np.nonzero(lhs > rhs * (1 + 1e-12))[0]
    if bad.size:
        raise EmbeddingError("phi1(t) <= phi2(ct) fails", float(t[bad[0]]))
    return c * T


def sum_space_norm(u, phi1: YoungFunction, phi2: YoungFunction, levels: int = 16,
                   extra=()) -> NormResult:
    """Upper estimate of the norm of L^{phi1} + L^{phi2} over two-block splits.

    u is split into its part above and below a threshold; each block goes to
    either space.  Thresholds are the quantiles of |u| plus ``extra``.
    """
    v, w = _sample(u)
    nz = v > 0
    if not nz.any():
        return NormResult(0.0)
    taus = np.quantile(v[nz], np.linspace(0, 1, levels))
    # the natural split sits where |u|/||u||_min crosses the kink of min(phi1, phi2)
    cross = _crossings(phi1, phi2, min(phi1.t[0], phi2.t[0]), max(phi1.t[-1], phi2.t[-1]))
    if cross:
        gauge = luxemburg_norm(u, combine(phi1, phi2, "min"), allow_nonconvex=True).value
        extra = list(extra) + [gauge * c for c in cross]
    taus = np.unique(np.concatenate([[0.0, math.inf], taus, np.asarray(extra, float)]))
    best = math.inf
    sample = QuadratureSample(v, w)
    for tau in taus:
        big, small = sample.split(v > tau)
        nb1 = luxemburg_norm(big, phi1).value
        ns2 = luxemburg_norm(small, phi2).value
        nb2 = luxemburg_norm(big, phi2).value
        ns1 = luxemburg_norm(small, phi1).value
        best = min(best, nb1 + ns2, nb2 + ns1)
    return NormResult(best, 0.0, len(taus))


def orlicz_norm_bounds(u, phi: YoungFunction) -> tuple[float, float]:
    """Two-sided bound [||u||, 2||u||] for the Orlicz (dual) norm."""
    n = luxemburg_norm(u, phi).value
    return n, 2.0 * n
