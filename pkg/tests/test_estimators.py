import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import FeatureUnion

from levy_orlicz import (
    CriticalYoungEstimator,
    GNSVerifier,
    NonlocalSeminormTransformer,
    OrliczNormTransformer,
    YoungFunction,
    golden_functions,
    lebesgue_norm,
)


def test_critical_young_estimator(frac):
    est = CriticalYoungEstimator().fit(frac)
    assert est.exponent_ == pytest.approx(4.0, abs=1e-6)
    assert est.coefficient_ == pytest.approx(32.0, rel=1e-6)
    assert est.predict([1.0])[0] == pytest.approx(32.0)
    assert est.theta_ == pytest.approx(2 ** -1.25, rel=1e-9)


def test_not_fitted_errors(hat):
    with pytest.raises(NotFittedError):
        CriticalYoungEstimator().predict([1.0])
    with pytest.raises(NotFittedError):
        OrliczNormTransformer(phi=YoungFunction.power(1, 2)).transform([hat])


def test_params_and_clone(frac):
    est = GNSVerifier(kernel=frac, t=3.0)
    assert est.get_params()["t"] == 3.0
    c = clone(est)
    assert c.t == 3.0 and c.kernel.describe() == frac.describe()


def test_transformers_in_feature_union(hat, indicator, frac):
    union = FeatureUnion([
        ("norm", OrliczNormTransformer(phi=YoungFunction.power(1.0, 2.0))),
        ("semi", NonlocalSeminormTransformer(kernel=frac)),
    ])
    X = union.fit_transform([hat, indicator])
    assert X.shape == (2, 2)
    assert X[0, 0] == pytest.approx(lebesgue_norm(hat, 2), rel=1e-10)
    assert X[1, 1] == pytest.approx(16.0, rel=1e-9)


def test_gns_verifier_scores_corpus(frac):
    fs = list(golden_functions(256).values())
    v = GNSVerifier(kernel=frac).fit()
    assert v.predict(fs).all()
    assert v.score(fs) == 1.0
    assert len(v.reports_) == len(fs)


def test_orlicz_transformer_from_kernel(hat, frac):
    tr = OrliczNormTransformer(kernel=frac).fit()
    assert tr.transform([hat])[0, 0] > 0
    root = NonlocalSeminormTransformer(kernel=frac, root=True).fit()
    full = NonlocalSeminormTransformer(kernel=frac).fit()
    assert root.transform(hat)[0, 0] ** 2 == pytest.approx(full.transform(hat)[0, 0])
