import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from viscomem import kernel as K
from viscomem.kernel import InadmissibleKernelError, XiProfile


# mu_c and mu_s of (1 + s)^-c, mpmath quadosc at 30 digits
POLY_TRANSFORMS = [
    (2.0, 0.5, 0.56973661713692072, 0.33634589643427456),
    (2.0, 1.0, 0.37855037576418664, 0.34337796155642703),
    (2.0, 4.0, 0.083229727901892081, 0.198712622374627),
    (3.0, 0.5, 0.41591352589143136, 0.14243415428423018),
    (3.0, 1.0, 0.32831101922178648, 0.18927518788209332),
    (3.0, 4.0, 0.102574755250746, 0.16645945580378416),
]


@pytest.mark.parametrize("c, w, mc, ms", POLY_TRANSFORMS)
def test_polynomial_fourier_closed_form(c, w, mc, ms):
    val = K.polynomial(1.0, c).fourier(np.array([w]))[0]
    assert val.real == pytest.approx(mc, rel=1e-12)
    assert -val.imag == pytest.approx(ms, rel=1e-12)


@pytest.mark.parametrize("c, w, mc, ms", POLY_TRANSFORMS)
def test_polynomial_quadrature_matches_closed_form(c, w, mc, ms):
    val = K.fourier_quadrature(K.polynomial(1.0, c), np.array([w]))[0]
    assert val.real == pytest.approx(mc, rel=1e-7)
    assert -val.imag == pytest.approx(ms, rel=1e-6)


@pytest.mark.parametrize("rate", [0.5, 1.0, 2.0])
def test_exponential_cosine_transform(rate):
    w = np.linspace(0, 50, 200)
    mc = K.cosine_transform(K.exponential(1.0, rate), w)
    np.testing.assert_allclose(mc, rate / (rate**2 + w**2), rtol=1e-8)


def test_exponential_mu_c_at_one():
    assert K.exponential().mu_c(np.array([1.0]))[0] == pytest.approx(0.5, rel=1e-14)


def test_cosine_transform_rejects_negative_frequency():
    with pytest.raises(ValueError):
        K.cosine_transform(K.exponential(), np.array([-1.0, 0.0]))


@pytest.mark.parametrize("n", [1, 2, 2.5, 4])
@pytest.mark.parametrize("z", [0.3, 2.0, 5.0 + 1.0j, 0.5 + 3.0j])
def test_expint_against_scipy_quad(n, z):
    from scipy.integrate import quad

    re = quad(lambda t: (np.exp(-z * t) / t**n).real, 1, np.inf, limit=500)[0]
    im = quad(lambda t: (np.exp(-z * t) / t**n).imag, 1, np.inf, limit=500)[0]
    got = K.expint(n, np.array([z]))[0]
    assert abs(got - (re + 1j * im)) <= 1e-8 * max(1.0, abs(got))


def test_total_viscosity():
    assert K.total_viscosity(K.exponential(2.0, 4.0)) == pytest.approx(0.5)
    assert K.total_viscosity(K.polynomial(1.0, 3.0)) == pytest.approx(0.5)
    assert K.total_viscosity(K.prony([1.0, 2.0], [1.0, 4.0])) == pytest.approx(1.5)


def test_total_viscosity_rejects_non_integrable():
    k = K.from_callable(lambda s: 1 + s, horizon=10.0, integrable=False)
    with pytest.raises(InadmissibleKernelError):
        K.total_viscosity(k)


def test_degenerate_kernel_warns():
    k = K.prony([0.0], [1.0])
    with pytest.warns(RuntimeWarning):
        assert K.total_viscosity(k) == 0.0


@pytest.mark.parametrize("make", [lambda: K.exponential(1.0, 0.7), lambda: K.prony([1, 2], [0.5, 3]),
                                  lambda: K.polynomial(2.0, 2.5)])
def test_analytic_derivatives_agree_with_finite_differences(make):
    k = make()
    s = np.linspace(0.1, 10, 37)
    np.testing.assert_allclose(k.dmu(s), K.finite_difference(k.mu, s, 1, 1e-3), rtol=1e-8)
    np.testing.assert_allclose(k.d2mu(s), K.finite_difference(k.mu, s, 2, 1e-2), rtol=1e-6)


def test_integral_matches_quad_for_callable():
    k = K.from_callable(lambda s: np.exp(-s) * (1 + 0.5 * np.cos(s)), horizon=40.0)
    from scipy.integrate import quad

    for x in [0.05, 1.0, 7.5]:
        ref = quad(lambda s: np.exp(-s) * (1 + 0.5 * np.cos(s)), 0, x)[0]
        assert k.integral(np.array([x]))[0] == pytest.approx(ref, rel=1e-9)


def test_tabulated_kernel_interpolates_and_has_compact_support():
    s = np.linspace(0, 1, 101)
    k = K.tabulated(s, (1 - s) ** 3)
    assert k.integrable and k.tau_max == pytest.approx(1.0)
    assert k.mu(np.array([2.0]))[0] == 0.0
    assert k.total() == pytest.approx(0.25, rel=1e-5)


def test_tabulated_from_csv(tmp_path):
    s = np.linspace(0, 20, 201)
    path = tmp_path / "k.csv"
    np.savetxt(path, np.column_stack([s, np.exp(-s)]), delimiter=",", header="s,mu", comments="")
    k = K.TabulatedKernel.from_csv(path)
    assert k.mu(np.array([1.0]))[0] == pytest.approx(math.exp(-1), rel=1e-5)


@pytest.mark.parametrize("rate", [0.5, 1.0, 2.0])
def test_exponential_is_admissible_with_constant_xi(rate):
    rep = K.check_admissibility(K.exponential(1.0, rate))
    assert rep.admissible and rep.decay_class == "exponential"
    assert rep.tightest_xi.c == pytest.approx(rate, rel=1e-9)


@pytest.mark.parametrize("c", [2.0, 3.0])
def test_polynomial_is_admissible_with_inverse_linear_xi(c):
    rep = K.check_admissibility(K.polynomial(1.0, c))
    assert rep.admissible and rep.decay_class == "polynomial"
    assert rep.tightest_xi.c == pytest.approx(c + 1, rel=1e-9)


def test_affine_counterexample_rejected():
    rep = K.check_admissibility(K.from_callable(lambda s: 1 + s, lambda s: 1 + 0 * s, lambda s: 0 * s,
                                                horizon=50.0, integrable=False))
    assert not rep.admissible
    assert not rep.mu_prime_negative


def test_convexity_failure_detected():
    # e^{-s} + s is decreasing near zero but turns upward
    k = K.from_callable(lambda s: np.exp(-s) + 0.05 * s, horizon=20.0, integrable=False)
    assert not K.check_admissibility(k).curvature_ok


def test_supplied_xi_too_large_fails_bound():
    rep = K.check_admissibility(K.exponential(1.0, 1.0), xi=XiProfile.constant(1.5))
    assert rep.mu_prime_negative and rep.mu_second_nonneg and not rep.xi_bound


def test_prony_tightest_xi_is_non_increasing_minorant():
    k = K.prony([0.5, 1.0], [0.5, 3.0])
    tau = K.sample_grid(k)
    xi = K.tightest_xi(k, tau)
    ratio = k.d2mu(tau) / -k.dmu(tau)
    assert np.all(xi(tau) <= ratio * (1 + 1e-12))
    assert xi.is_monotone(tau)


def test_xi_profile_integrals():
    assert XiProfile.constant(2.0).integral(3.0) == pytest.approx(6.0)
    assert XiProfile.inverse_linear(3.0).integral(math.e - 1) == pytest.approx(3.0)
    xs = XiProfile.sampled([0, 1, 2], [2.0, 1.0, 1.0])
    assert xs.integral(2.0) == pytest.approx(2.5)
    assert xs.integral(3.0) == pytest.approx(3.5)


@given(st.floats(0.2, 5.0), st.floats(0.1, 3.0))
def test_mu_c_positive_for_exponentials(rate, w):
    assert K.exponential(1.0, rate).mu_c(np.array([w]))[0] > 0


@given(st.floats(1.5, 4.0), st.floats(0.0, 30.0))
def test_polynomial_mu_c_positive(c, w):
    assert K.polynomial(1.0, c).mu_c(np.array([w]))[0] > 0
