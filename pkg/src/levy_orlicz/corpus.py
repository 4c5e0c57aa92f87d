"""Golden test functions, named kernels and random generators."""
from __future__ import annotations

import numpy as np

from .fields import GridFunction
from .kernels import Kernel

__all__ = [
    "GOLDEN_FUNCTIONS",
    "GOLDEN_KERNELS",
    "golden_function",
    "golden_functions",
    "golden_kernel",
    "golden_kernels",
    "random_function",
    "random_tabulated_kernel",
]

GOLDEN_FUNCTIONS = ("hat", "indicator", "bump", "two-bump")
# kernel name -> (constructor, verification strategy)
GOLDEN_KERNELS = {
    "fractional-1/8": (lambda p, d: Kernel.fractional(1 / 8, p, d), "direct"),
    "fractional-1/4": (lambda p, d: Kernel.fractional(1 / 4, p, d), "direct"),
    "max-fractional": (lambda p, d: Kernel.max_fractional(1 / 8, 1 / 4, p, d), "per-component"),
    "min-fractional": (lambda p, d: Kernel.min_fractional(1 / 8, 1 / 4, p, d), "minorant"),
}


def _bump(x):
    x = np.asarray(x, float)
    out = np.zeros_like(x)
    inside = np.abs(x) < 1
    out[inside] = np.exp(-1.0 / (1.0 - x[inside] ** 2))
    return out


def golden_function(name: str, resolution: int = 1024, lo: float = -2.0,
                    hi: float = 2.0) -> GridFunction:
    """One corpus member on [lo, hi] with ``resolution`` cells.

    With the default window and a power-of-two resolution the kinks at
    x = +-1 and +-0.5 fall on grid nodes.
    """
    if name == "hat":
        f = lambda x: np.maximum(0.0, 1.0 - np.abs(x))  # noqa: E731
        return GridFunction.from_callable(f, lo, hi, resolution + 1, label=name)
    if name == "indicator":
        f = lambda x: (np.abs(x) < 1).astype(float)  # noqa: E731
        return GridFunction.from_callable(f, lo, hi, resolution, kind="constant", label=name)
    if name == "bump":
        return GridFunction.from_callable(_bump, lo, hi, resolution + 1, label=name)
    if name == "two-bump":
        f = lambda x: _bump(2 * (x - 1)) + 0.5 * _bump(2 * (x + 1))  # noqa: E731
        return GridFunction.from_callable(f, lo, hi, resolution + 1, label=name)
    raise KeyError(f"unknown corpus function {name!r}")


def golden_functions(resolution: int = 1024) -> dict[str, GridFunction]:
    return {k: golden_function(k, resolution) for k in GOLDEN_FUNCTIONS}


def golden_kernel(name: str, p: float = 2.0, d: int = 1) -> Kernel:
    try:
        return GOLDEN_KERNELS[name][0](p, d)
    except KeyError:
        raise KeyError(f"unknown corpus kernel {name!r}") from None


def golden_kernels(p: float = 2.0, d: int = 1) -> dict[str, tuple[Kernel, str]]:
    return {k: (ctor(p, d), strat) for k, (ctor, strat) in GOLDEN_KERNELS.items()}


def random_function(rng: np.random.Generator, resolution: int = 256, kind: str = "linear",
                    d: int = 1, nonneg: bool = False) -> GridFunction:
    """Random compactly supported function on [-1, 1]^d.

    Linear kind vanishes on the boundary nodes; values are rounded to a
    coarse lattice so that repeated levels occur.
    """
    n = resolution + 1 if kind == "linear" else resolution
    shape = (n,) * d
    v = rng.normal(size=shape)
    v = np.round(v * 8) / 8
    if nonneg:
        v = np.abs(v)
    if kind == "linear":
        for ax in range(d):
            idx = [slice(None)] * d
            idx[ax] = [0, -1]
            v[tuple(idx)] = 0.0
    h = 2.0 / (n - 1) if kind == "linear" else 2.0 / n
    return GridFunction(v, h, (-1.0,) * d, kind, "random")


def random_tabulated_kernel(rng: np.random.Generator, p: float = 2.0, d: int = 1,
                            knots: int = 6) -> Kernel:
    """Random radial p-Levy profile: piecewise power law with slopes in (-d-p, -d)."""
    r = np.logspace(-3, 3, knots)
    slopes = -d - p * rng.uniform(0.1, 0.9, size=knots - 1)
    lv = np.concatenate([[0.0], np.cumsum(slopes * np.diff(np.log(r)))])
    lv += rng.normal()
    vals = np.exp(lv)
    return Kernel.tabulated(r, vals, p=p, d=d, exp0=float(slopes[0]), exp_inf=float(slopes[-1]),
                            params={"slopes": [float(s) for s in slopes]})
