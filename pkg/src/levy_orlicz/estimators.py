"""scikit-learn style wrappers.

Inputs are sequences of GridFunction objects rather than feature matrices;
each transformer maps them to one column of numbers.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .fields import nonlocal_seminorm
from .orlicz import luxemburg_norm
from .verify import gns_setup, verify_gns
from .young import fit_power

__all__ = ["CriticalYoungEstimator", "OrliczNormTransformer", "NonlocalSeminormTransformer",
           "GNSVerifier"]


def _as_list(X):
    return list(X) if isinstance(X, (list, tuple)) else [X]


class CriticalYoungEstimator(BaseEstimator):
    """Critical Young function of a kernel, with its power-law fit.

    ``fit`` takes the kernel itself; ``predict`` evaluates phi.
    """

    def __init__(self, mode: str = "a", strategy: str | None = None):
        self.mode = mode
        self.strategy = strategy

    def fit(self, kernel, y=None):
        setup = gns_setup(kernel, self.mode, self.strategy)
        self.setup_ = setup
        self.phi_ = setup.phi
        self.phi_norm_ = setup.phi_norm
        self.kappa_ = setup.kappa
        self.theta_ = setup.theta
        self.strategy_ = setup.strategy
        self.exponent_, self.coefficient_ = fit_power(setup.phi)
        return self

    def predict(self, t):
        if not hasattr(self, "phi_"):
            raise NotFittedError("call fit with a kernel first")
        return self.phi_(np.asarray(t, float))

    def constant(self, t: float = 2.0) -> float:
        if not hasattr(self, "setup_"):
            raise NotFittedError("call fit with a kernel first")
        return self.setup_.constant(t)


class OrliczNormTransformer(TransformerMixin, BaseEstimator):
    """Luxemburg norms in a given Young function or in a kernel's critical one."""

    def __init__(self, phi=None, kernel=None, mode: str = "a"):
        self.phi = phi
        self.kernel = kernel
        self.mode = mode

    def fit(self, X=None, y=None):
        if self.phi is not None:
            self.phi_ = self.phi
        elif self.kernel is not None:
            self.phi_ = gns_setup(self.kernel, self.mode).phi_norm
        else:
            raise ValueError("give phi or kernel")
        return self

    def transform(self, X):
        if not hasattr(self, "phi_"):
            raise NotFittedError("OrliczNormTransformer is not fitted")
        return np.array([[luxemburg_norm(u, self.phi_).value] for u in _as_list(X)])


class NonlocalSeminormTransformer(TransformerMixin, BaseEstimator):
    """|u|^p of the nonlocal seminorm, or its p-th root with ``root=True``."""

    def __init__(self, kernel=None, root: bool = False):
        self.kernel = kernel
        self.root = root

    def fit(self, X=None, y=None):
        if self.kernel is None:
            raise ValueError("kernel is required")
        self.p_ = self.kernel.p
        return self

    def transform(self, X):
        if not hasattr(self, "p_"):
            raise NotFittedError("NonlocalSeminormTransformer is not fitted")
        vals = np.array([nonlocal_seminorm(u, self.kernel).value for u in _as_list(X)])
        if self.root:
            vals = vals ** (1.0 / self.p_)
        return vals[:, None]


class GNSVerifier(BaseEstimator):
    """Checks the nonlocal Sobolev inequality on each function.

    ``predict`` returns pass flags, ``score`` the fraction passing and
    ``reports_`` keeps the full records of the last call.
    """

    def __init__(self, kernel=None, t: float = 2.0, mode: str = "a", strategy: str | None = None):
        self.kernel = kernel
        self.t = t
        self.mode = mode
        self.strategy = strategy

    def fit(self, X=None, y=None):
        if self.kernel is None:
            raise ValueError("kernel is required")
        self.setup_ = gns_setup(self.kernel, self.mode, self.strategy)
        return self

    def verify(self, X):
        if not hasattr(self, "setup_"):
            raise NotFittedError("GNSVerifier is not fitted")
        self.reports_ = [verify_gns(u, self.kernel, self.t, self.mode, setup=self.setup_)
                         for u in _as_list(X)]
        return self.reports_

    def predict(self, X):
        return np.array([r.passed for r in self.verify(X)])

    def score(self, X, y=None):
        return float(np.mean(self.predict(X)))
