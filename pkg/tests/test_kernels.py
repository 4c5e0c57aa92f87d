import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from levy_orlicz import (
    GridKernel,
    KappaError,
    Kernel,
    SaturationError,
    SetSpec,
    almost_decreasing_kappa,
    exterior_mass_bound,
    gamma_s,
    kernel_from_young,
    levy_modular,
    nu_sharp,
    nu_star,
    random_tabulated_kernel,
    rearrange_kernel,
    tail_mass,
    unit_ball_volume,
    w_profile,
)
from levy_orlicz.kernels import _distribution
from levy_orlicz.young import YoungFunction

s_values = st.floats(0.05, 0.95)


def test_levy_modular_fractional_finite(frac):
    # 2 int_0^1 r^2 r^{-3/2} dr + 2 int_1^inf r^{-3/2} dr = 4/3 + 4
    lm = levy_modular(frac)
    assert lm.is_levy
    assert lm.value == pytest.approx(16 / 3, rel=1e-8)


def test_levy_modular_indicator_ball():
    assert levy_modular(Kernel.indicator_ball()).value == pytest.approx(2 / 3, rel=1e-8)


def test_levy_modular_log_divergent_tail():
    k = Kernel(1, 2.0, [0, 1, np.inf], [1.0, 1.0], [-1.5, -1.0])
    lm = levy_modular(k)
    assert not lm.is_levy and "tail" in lm.reason


def test_levy_modular_divergent_origin():
    k = Kernel(1, 2.0, [0, np.inf], [1.0], [-3.0])
    assert not levy_modular(k).is_levy


def test_tail_mass_examples(frac):
    assert tail_mass(frac, 1.0) == pytest.approx(4.0, rel=1e-12)
    assert tail_mass(frac, 1e12) < 1e-5
    assert tail_mass(Kernel.indicator_ball(), 2.0) == 0.0


@given(s=s_values, rho=st.floats(1e-3, 1e3))
def test_tail_mass_closed_form(s, rho):
    k = Kernel.fractional(s)
    want = 2 * rho ** (-2 * s) / (2 * s)
    assert tail_mass(k, rho) == pytest.approx(want, rel=1e-10)


def test_w_profile_fractional(frac):
    w = w_profile(frac)
    r = np.logspace(-3, 3, 13)
    assert np.allclose(w(r), 2 ** 1.25 * r ** 0.25, rtol=1e-10)
    assert gamma_s(0.25, 2, 1) == pytest.approx(2 ** 2.5)
    assert float(w(0.0)) == 0.0
    assert w.check()


def test_w_profile_max_fractional():
    k = Kernel.max_fractional(1 / 8, 1 / 4)
    w = w_profile(k)
    r = np.logspace(-3, 3, 25)
    want = np.maximum(r ** (2 / (8 / 3)), r ** (2 / 4))
    assert np.allclose(w.wp(r), want, rtol=1e-9)


def test_w_profile_saturates_for_compact_support():
    with pytest.raises(SaturationError) as exc:
        w_profile(Kernel.indicator_ball())
    assert exc.value.radius == pytest.approx(1.0)


def test_kappa_decreasing_and_min_kernel():
    assert almost_decreasing_kappa(Kernel.fractional(0.3)) == 1.0
    assert almost_decreasing_kappa(Kernel.max_fractional(1 / 8, 1 / 4)) == 1.0
    # the min kernel jumps up by gamma_{s2}/gamma_{s1} at the break radius
    k = Kernel.min_fractional(1 / 8, 1 / 4)
    assert almost_decreasing_kappa(k) == pytest.approx(0.5, rel=1e-6)


def test_kappa_fails_on_interior_zero():
    k = Kernel(1, 2.0, [0, 1, 2, np.inf], [1.0, 0.0, 1.0], [-1.5, 0.0, -1.5])
    with pytest.raises(KappaError) as exc:
        almost_decreasing_kappa(k)
    assert exc.value.witness is not None


@given(s=s_values, m=st.floats(1e-3, 1e3))
def test_nu_sharp_fractional_closed_form(s, m):
    k = Kernel.fractional(s)
    assert nu_sharp(k, m) == pytest.approx(gamma_s(s, 2, 1) * m ** (-2 * s), rel=1e-9)


def test_nu_sharp_fixture_value(frac):
    assert nu_sharp(frac, 2.0) == pytest.approx(4.0, rel=1e-12)


def test_nu_star_of_decreasing_kernel_is_itself(frac):
    rho = np.logspace(-2, 2, 9)
    assert np.allclose(nu_star(frac, rho), frac(rho), rtol=1e-9)
    assert rearrange_kernel(frac) is frac


def test_rearrange_nonmonotone_kernel_equimeasurable():
    k = Kernel.min_fractional(1 / 8, 1 / 4)
    r = rearrange_kernel(k)
    assert r.is_nonincreasing()
    for level in (0.05, 0.2, 1.0, 5.0):
        assert np.asarray(_distribution(r, level)).item() == pytest.approx(np.asarray(_distribution(k, level)).item(),
                                                                rel=1e-3)


def test_rearrange_grid_kernel_exact(rng):
    g = GridKernel(rng.uniform(0, 1, size=(17, 17)), 0.1)
    r = rearrange_kernel(g)
    for level in np.linspace(0.05, 0.95, 19):
        assert np.asarray(_distribution(r, level)).item() == pytest.approx(g.level_measure(level), abs=1e-8)


def test_exterior_mass_bound_holds(frac):
    E = SetSpec.interval(0, 1)
    for x in (0.5, 0.1, 0.9):
        rep = exterior_mass_bound(frac, E, x)
        assert rep.passed
    # the centre of a ball is the equality case
    assert exterior_mass_bound(frac, E, 0.5).sharp_margin == pytest.approx(0, abs=1e-10)


def test_exterior_mass_bound_2d():
    k = Kernel.fractional(0.5, 2, 2)
    rep = exterior_mass_bound(k, SetSpec.ball([0.0, 0.0], 1.0), [0.3, 0.1], samples=256)
    assert rep.passed


def test_set_spec_geometry():
    E = SetSpec.interval(0, 1)
    assert E.measure == 1.0 and E.diameter == 1.0
    B = SetSpec.ball([0.0, 0.0], 2.0)
    assert B.measure == pytest.approx(4 * math.pi)
    assert B.radius == pytest.approx(2.0, rel=1e-12)
    assert unit_ball_volume(2) == pytest.approx(math.pi)


def test_kernel_from_young_recovers_fractional():
    k = kernel_from_young(YoungFunction.power(32.0, 4.0, 2.0), 2.0, 1)
    rho = np.logspace(-2, 2, 9)
    assert np.allclose(k(rho), rho ** -1.5, rtol=1e-3)


def test_random_tabulated_kernel_is_levy(rng):
    for _ in range(5):
        k = random_tabulated_kernel(rng)
        assert levy_modular(k).is_levy
        assert almost_decreasing_kappa(k) == 1.0


def test_csv_round_trip(tmp_path, frac):
    path = tmp_path / "k.csv"
    frac.to_csv(path)
    back = Kernel.from_csv(path)
    rho = np.logspace(-3, 3, 11)
    assert np.allclose(back(rho), frac(rho), rtol=1e-10)


@pytest.mark.parametrize("a", [1.0, 2.0])
def test_log_family_kernel_has_bounded_w(a):
    # r xi^a(r) -> a + 1, so the tail is 1/(r xi) - 1/(a+1) and
    # w^p = 1/xi - r/(a+1) -> a / (2(a+1))
    with pytest.raises(SaturationError) as exc:
        w_profile(Kernel.log_family(a))
    assert exc.value.radius == math.inf
    assert exc.value.bound ** 2 == pytest.approx(a / (2 * (a + 1)), rel=1e-3)
