import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from levy_orlicz import (
    GridFunction,
    HypothesisError,
    InequalityReport,
    Kernel,
    SetSpec,
    YoungFunction,
    brezis_constant,
    golden_functions,
    golden_kernels,
    gns_setup,
    nonlocal_seminorm,
    random_function,
    theta_constant,
    verify_fractional_gns,
    verify_friedrichs,
    verify_gns,
    verify_inverse_problem,
    verify_poincare,
    write_jsonl,
    write_summary_csv,
)

PHI = YoungFunction.power(32.0, 4.0, 2.0)
THETA = 2 ** -1.25


def test_theta_constant_formula():
    want = 2 * (2 * (2 / 3) * 32 * (THETA / 2) ** 4) ** -0.5
    assert theta_constant(2, 2, 1.0, THETA, PHI) == pytest.approx(want, rel=1e-14)
    assert want == pytest.approx(math.sqrt(48), rel=1e-12)


def test_theta_constant_refusals():
    with pytest.raises(ValueError):
        theta_constant(1.5, 2, 1.0, THETA, PHI)
    with pytest.raises(ValueError):
        theta_constant(2, 2, 1.0, 0.0, PHI)
    with pytest.raises(ValueError):
        theta_constant(2, 2, 1.0, 1e-100, PHI)


@given(kappa=st.floats(0.05, 1.0), t=st.floats(2.0, 6.0))
def test_theta_constant_monotone_in_kappa(kappa, t):
    # the kappa-free constant is never larger than the kappa-dependent one
    a = theta_constant(t, 2, kappa, THETA, PHI, mode="a")
    mr2 = theta_constant(t, 2, kappa, THETA, PHI, mode="mr2")
    assert mr2 <= a * (1 + 1e-12)


def test_report_pass_rule():
    assert InequalityReport("x", 1.0, 1.0 - 1e-7, 1.0, 1e-6).passed
    assert not InequalityReport("x", 1.0, 0.9, 1.0, 1e-6).passed


def test_gns_zero_function(frac):
    u = GridFunction(np.zeros(16), 0.1, (0.0,), "constant")
    rep = verify_gns(u, frac, 2)
    assert rep.passed and rep.lhs == 0.0 and rep.rhs == 0.0


def test_gns_hat_and_indicator(hat, indicator, frac):
    for u in (hat, indicator):
        rep = verify_gns(u, frac, 2)
        assert rep.passed and rep.margin > 0


def test_gns_setup_strategies():
    ks = golden_kernels()
    assert gns_setup(ks["fractional-1/4"][0]).strategy == "direct"
    assert gns_setup(ks["max-fractional"][0]).strategy == "per-component"
    assert gns_setup(ks["min-fractional"][0]).strategy == "minorant"
    with pytest.raises(HypothesisError):
        gns_setup(ks["max-fractional"][0], strategy="direct")


def test_gns_random_functions(rng, frac):
    setup = gns_setup(frac)
    for _ in range(5):
        u = random_function(rng, 256, "constant")
        assert verify_gns(u, frac, 2, setup=setup).passed


def test_gns_mr2_mode(hat):
    k = Kernel.min_fractional(1 / 8, 1 / 4)
    rep = verify_gns(hat, k, 2, mode="mr2")
    assert rep.passed


def test_brezis_constant_fixture():
    assert brezis_constant(0.25, 2, 1) == pytest.approx(2 ** 1.25, rel=1e-14)


def test_fractional_gns_and_dilation(hat):
    margins = []
    for lam in (0.5, 1.0, 2.0):
        rep = verify_fractional_gns(hat.dilate(lam), 0.25, 2)
        assert rep.passed
        margins.append(rep.margin / rep.rhs)
    assert max(margins) - min(margins) <= 0.01 * abs(margins[1])


def test_fractional_gns_refuses_supercritical(hat):
    with pytest.raises(HypothesisError):
        verify_fractional_gns(hat, 0.6, 2)


def test_poincare_fixture(frac):
    u = GridFunction.from_callable(lambda x: x, 0, 1, 1025)
    rep = verify_poincare(u, SetSpec.interval(0, 1), frac)
    assert rep.constant == pytest.approx(1.0)
    assert rep.lhs ** 2 == pytest.approx(1 / 12, abs=1e-4)
    assert rep.passed


def test_poincare_constant_function(frac):
    u = GridFunction.from_callable(lambda x: 3 + 0 * x, 0, 1, 65)
    rep = verify_poincare(u, SetSpec.interval(0, 1), frac)
    assert rep.lhs == pytest.approx(0.0, abs=1e-12) and rep.passed


def test_poincare_refuses_vanishing_kernel():
    u = GridFunction.from_callable(lambda x: x, 0, 3, 65)
    with pytest.raises(HypothesisError):
        verify_poincare(u, SetSpec.interval(0, 3), Kernel.indicator_ball())


def test_friedrichs_fixture(frac):
    u = GridFunction.from_callable(lambda x: np.maximum(0, 1 - np.abs(2 * x - 1)), 0, 1, 1025)
    rep = verify_friedrichs(u, SetSpec.interval(0, 1), frac)
    assert rep.constant == pytest.approx((2 * 2 ** 2.5) ** -0.5, rel=1e-12)
    assert rep.constant == pytest.approx(0.29730, abs=1e-5)
    assert rep.passed


def test_friedrichs_needs_support_inside(hat, frac):
    with pytest.raises(HypothesisError):
        verify_friedrichs(hat, SetSpec.interval(0, 1), frac)


def test_inverse_problem_fixture():
    rep = verify_inverse_problem(4, 32, 2, 1)
    assert rep.passed
    assert rep.params["exponent"] == pytest.approx(-1.5, abs=1e-4)
    assert rep.params["coefficient"] == pytest.approx(1.0, rel=1e-3)
    assert rep.params["round_trip_error"] <= 1e-3


@pytest.mark.parametrize("q", [2.0, 1.0])
def test_inverse_problem_refusals(q):
    with pytest.raises(HypothesisError):
        verify_inverse_problem(q, 1.0, 2, 1)


def test_report_files(tmp_path, hat, frac):
    reps = [verify_gns(hat, frac, 2), verify_inverse_problem(4, 32)]
    write_jsonl(reps, tmp_path / "r.jsonl")
    write_summary_csv(reps, tmp_path / "s.csv")
    rows = [json.loads(x) for x in (tmp_path / "r.jsonl").read_text().splitlines()]
    assert [r["id"] for r in rows] == ["gns", "inverse"]
    assert (tmp_path / "s.csv").read_text().splitlines()[0] == "id,lhs,rhs,margin,pass"
