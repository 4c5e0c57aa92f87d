import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from levy_orlicz import (
    GridFunction,
    Kernel,
    YoungFunction,
    c_p,
    critical_young,
    dyadic_decompose,
    lemma_gene_convex_check,
    lemma_young_discrete_check,
    luxemburg_norm,
    nonlocal_seminorm,
    orlicz_upper_bound,
    proof_lower_bound,
    random_function,
    w_profile,
)

PHI = YoungFunction.power(32.0, 4.0, 2.0)
THETA = 2 ** -1.25


def _nonincreasing(draw_list):
    a = np.sort(np.asarray(draw_list, float))[::-1]
    return a


sequences = st.lists(st.floats(0.0, 1e3), min_size=1, max_size=30).map(_nonincreasing)


def test_c_p_value():
    assert c_p(2, 2) == pytest.approx(2 / 3)


def test_indicator_decomposition(indicator):
    dec = dyadic_decompose(indicator, 2)
    assert dec.k_max == 0
    assert dec.a_at(0) == 0.0
    assert dec.a_at(-1) == pytest.approx(1.0)
    assert dec.residual == 0.0
    assert np.isclose(dec.d.sum(), dec.a[0])


def test_hat_decomposition(hat):
    dec = dyadic_decompose(hat, 2)
    for k in range(-10, 1):
        assert dec.a_at(k) == pytest.approx(2 * (1 - 2.0 ** k), abs=1e-12)


def test_index_shift_covariance(hat):
    a = dyadic_decompose(hat, 2)
    b = dyadic_decompose(hat * 2.0, 2)
    assert b.k_max == a.k_max + 1
    assert np.array_equal(a.a, b.a)


def test_refuses_negative_and_small_base(hat):
    with pytest.raises(ValueError):
        dyadic_decompose(hat * -1.0, 2)
    with pytest.raises(ValueError):
        dyadic_decompose(hat, 1.5)


def test_telescoping_is_exact_in_cell_counts(rng):
    u = random_function(rng, 256, "constant", nonneg=True)
    dec = dyadic_decompose(u, 2)
    assert dec.d.sum() == pytest.approx(dec.a[0] - dec.a[-1], abs=1e-14)


@pytest.mark.parametrize("t", [2.0, 3.0])
def test_proof_chain_links(hat, indicator, frac, t):
    w = w_profile(frac)
    phi = critical_young(w)
    for u in (hat, indicator):
        dec = dyadic_decompose(u, t)
        sn = nonlocal_seminorm(u, frac)
        assert proof_lower_bound(dec, w, 1.0, 2) <= sn.value + 2 * sn.error_estimate
        lux = luxemburg_norm(u, phi).value
        assert lux ** 2 <= orlicz_upper_bound(dec, phi, 2) * (1 + 1e-9)


def test_upper_bound_is_tight_for_indicator(indicator, frac):
    phi = critical_young(w_profile(frac))
    dec = dyadic_decompose(indicator, 2)
    lux = luxemburg_norm(indicator, phi).value
    assert lux ** 2 == pytest.approx(orlicz_upper_bound(dec, phi, 2), rel=1e-9)


def test_gene_convex_example():
    # a_k = 1 for k <= 0, phi = 32 t^4, T = 4
    rep = lemma_gene_convex_check([1.0], PHI, 2, THETA, 4.0, k0=0)
    # w^p(1) = 1/phi^{-1}(1)^2 = sqrt(32), factor phi_2(theta^2/4) = 1/16
    wp = 32 ** 0.5
    assert rep.lhs == pytest.approx(wp * (1 + 1 / 3) / 16, rel=1e-12)
    assert rep.rhs == pytest.approx(wp / 3, rel=1e-12)
    assert rep.passed


def test_young_discrete_examples():
    rep = lemma_young_discrete_check([1.0], 2.0, 2.0, k0=0)
    assert rep.lhs == pytest.approx(2.0) and rep.rhs == pytest.approx(4.0)
    rep1 = lemma_young_discrete_check([4.0, 2.0, 1.0, 0.5], 1.0, 2.0)
    assert rep1.lhs == pytest.approx(rep1.rhs, rel=1e-15)


def test_young_discrete_divergent_is_vacuous():
    rep = lemma_young_discrete_check([1.0], 2.0, 0.5)
    assert rep.vacuous and rep.passed


def test_young_discrete_refuses_broken_support():
    with pytest.raises(ValueError):
        lemma_young_discrete_check([1.0, 0.0, 1.0], 2.0, 2.0)


@given(a=sequences, k0=st.integers(-20, 5))
def test_gene_convex_random(a, k0):
    assert lemma_gene_convex_check(a, PHI, 2, THETA, 4.0, k0).passed


@given(a=sequences, q=st.floats(1.0, 6.0), T=st.floats(1.01, 16.0), k0=st.integers(-20, 5))
def test_young_discrete_random(a, q, T, k0):
    assert lemma_young_discrete_check(a, q, T, k0).passed


@given(a=sequences, k0=st.integers(-10, 5))
def test_young_discrete_equality_at_q1(a, k0):
    rep = lemma_young_discrete_check(a, 1.0, 2.0, k0)
    assert rep.lhs == pytest.approx(rep.rhs, rel=1e-12, abs=1e-300)


def test_young_discrete_on_hat(hat):
    dec = dyadic_decompose(hat, 2)
    rep = lemma_young_discrete_check(dec.a[:-1], 2.0, 4.0, dec.k_min)
    assert rep.passed and rep.margin > 0
