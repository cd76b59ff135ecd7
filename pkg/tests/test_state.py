import numpy as np
import pytest
from hypothesis import given, strategies as st

from viscomem import kernel as K
from viscomem.field import Mesh
from viscomem.state import (
    History, MinimalState, apply_impulse, build_state_from_history, evolve_state, extra_stress,
    history_integral, state_from_function, states_equivalent, zero_state,
)

MESH = Mesh("channel1d", 4)

# -2 int_{0.5}^{2} mu'(xi + tau) d xi = 2 (mu(tau + 0.5) - mu(tau + 2)), mpmath
BLOCK = {
    "exp": (K.exponential, [0.94239075295204146, 0.69814024078883572, 0.12753871947032923]),
    "poly3": (lambda: K.polynomial(1.0, 3.0), [0.51851851851851852, 0.28728257990578163, 0.030647230320699708]),
}
TAUS = [0.0, 0.3, 2.0]


@pytest.mark.parametrize("name", BLOCK)
def test_block_history_quadrature(name):
    make, want = BLOCK[name]
    k = make()
    h = History.block(MESH, 1.0, 0.5, 2.0)
    got = history_integral(k, h, TAUS)[:, 0]
    np.testing.assert_allclose(got, want, rtol=1e-13)
    np.testing.assert_allclose(h.exact_state(k, TAUS)[:, 0], want, rtol=1e-14)


def test_smooth_history_quadrature_prony():
    k = K.prony([0.5, 1.0], [0.5, 3.0])
    # E_r = s e^{-s}: -2 int mu'(xi + tau) xi e^{-xi} = 2 sum a_i r_i e^{-r_i tau} / (r_i + 1)^2
    h = History.separable(MESH, lambda s: s * np.exp(-s), 1.0)
    tau = np.array([0.0, 1.0, 4.0])
    exact = sum(2 * a * r * np.exp(-r * tau) / (r + 1) ** 2 for a, r in [(0.5, 0.5), (1.0, 3.0)])
    np.testing.assert_allclose(history_integral(k, h, tau)[:, 0], exact, rtol=1e-12)


def test_history_must_vanish_at_origin():
    with pytest.raises(ValueError):
        History.separable(MESH, lambda s: 1.0 + s, 1.0)
    with pytest.raises(ValueError):
        History.block(MESH, 1.0, 2.0, 1.0)


def test_history_from_past_strain_and_table():
    h = History.from_past_strain(MESH, lambda t: np.multiply.outer(np.cos(t), np.ones(4)))
    np.testing.assert_allclose(h(np.array([1.0]))[0], np.cos(-1.0) - 1.0)
    tab = History.tabulated(MESH, [0.0, 1.0, 2.0], np.outer([0.0, 1.0, 3.0], np.ones(4)))
    np.testing.assert_allclose(tab(np.array([0.5, 1.5, 5.0]))[:, 0], [0.5, 2.0, 3.0])


def test_duhamel_constant_strain_rate():
    # constant strain rate G from t = 0: I(tau, t) = -2 G e^{-tau} (1 - e^{-t})
    k = K.exponential()
    G = 0.3
    st0 = zero_state(MESH, 0.05, 30.0, k)
    s = st0
    for _ in range(60):
        s = evolve_state(s, k, np.full(4, 2 * G), 0.05)
    assert s.time == pytest.approx(3.0)
    i = int(round(0.7 / 0.05))
    assert s.values[i, 0] == pytest.approx(-0.28311706639264208, rel=1e-12)
    # the tail evaluator continues the exact solution beyond the grid
    far = s.tail(np.array([31.0]))[0, 0]
    assert far == pytest.approx(-2 * G * np.exp(-31.0) * (1 - np.exp(-3.0)), rel=1e-9)


def test_short_steps_converge_at_first_order():
    # upwind interpolation when dt < dtau: error halves with the grid
    k = K.exponential()
    errs = []
    for dtau in (0.05, 0.025, 0.0125):
        s = zero_state(MESH, dtau, 30.0, k)
        dt = dtau / 2
        for _ in range(int(round(3.0 / dt))):
            s = evolve_state(s, k, np.full(4, 0.6), dt)
        errs.append(abs(s.evaluate(np.array([0.7]))[0, 0] + 0.28311706639264208))
    assert errs[0] < 0.02
    assert 1.8 < errs[0] / errs[1] < 2.2 and 1.8 < errs[1] / errs[2] < 2.2


def test_pure_transport_is_exact_shift():
    k = K.polynomial(1.0, 3.0)
    h = History.block(MESH, np.arange(4.0), 0.5, 2.0)
    s0 = build_state_from_history(k, h, dtau=0.1, horizon=20.0)
    s = s0
    for _ in range(7):
        s = evolve_state(s, k, np.zeros(4), 0.1)
    np.testing.assert_allclose(s.values[:-7], s0.values[7:], rtol=0, atol=0)
    np.testing.assert_allclose(s.values[-1], h.exact_state(k, [20.7])[0], rtol=1e-12)


def test_step_larger_than_grid_rejected():
    k = K.exponential()
    with pytest.raises(ValueError):
        evolve_state(zero_state(MESH, 0.05, 5.0, k), k, np.zeros(4), 0.1)


def test_impulse_and_stress():
    k = K.exponential()
    s = apply_impulse(zero_state(MESH, 0.1, 10.0, k), k, np.full(4, 2.0))
    np.testing.assert_allclose(s.values[:, 0], -2.0 * np.exp(-s.tau), rtol=1e-15)
    np.testing.assert_allclose(extra_stress(s).values, 2.0)
    np.testing.assert_allclose(s.tail(np.array([12.0]))[0], -2.0 * np.exp(-12.0), rtol=1e-14)


def test_shape_mismatch_rejected():
    with pytest.raises(ValueError):
        MinimalState(MESH, 0.1, np.zeros((5, 3)))
    k = K.exponential()
    with pytest.raises(ValueError):
        evolve_state(zero_state(MESH, 0.1, 1.0, k), k, np.zeros(3), 0.1)


def test_state_from_function_and_evaluate():
    f = lambda t: np.multiply.outer(np.exp(-np.asarray(t)), np.ones(4))
    s = state_from_function(MESH, f, 0.1, 5.0)
    np.testing.assert_allclose(s.evaluate(np.array([0.25, 7.0]))[:, 0], np.exp([-0.25, -7.0]))
    assert s.scaled(3.0).values[0, 0] == pytest.approx(3.0)


def test_equivalent_histories_under_exponential_kernel():
    # same first exponential moment: b (e^{-0.5} - e^{-1}) = e^{-1} - e^{-2}
    k = K.exponential()
    b = (np.exp(-1) - np.exp(-2)) / (np.exp(-0.5) - np.exp(-1))
    h1 = History.block(MESH, 1.0, 1.0, 2.0)
    h2 = History.block(MESH, b, 0.5, 1.0)
    assert states_equivalent(k, h1, h2)
    assert not states_equivalent(k, h1, 2.0 * h1)


def test_equivalent_histories_beyond_compact_support():
    s = np.linspace(0.0, 1.0, 201)
    k = K.tabulated(s, (1 - s) ** 3)
    base = History.separable(MESH, lambda q: np.sin(q) * q, 1.0)
    bump = History.separable(MESH, lambda q: np.where((q > 1.2) & (q < 1.8), np.sin(np.pi * (q - 1.2) / 0.6) ** 2, 0.0),
                             1.0, breakpoints=(1.2, 1.8))
    assert states_equivalent(k, base, base + bump)
    assert not states_equivalent(k, base, 1.5 * base)


@given(st.floats(-2, 2), st.floats(-2, 2))
def test_state_map_is_linear(a, b):
    k = K.exponential(1.0, 0.7)
    h1 = History.block(MESH, 1.0, 0.5, 2.0)
    h2 = History.separable(MESH, lambda s: s * np.exp(-s), np.arange(4.0))
    tau = np.array([0.0, 0.5, 3.0])
    lhs = history_integral(k, a * h1 + b * h2, tau)
    rhs = a * history_integral(k, h1, tau) + b * history_integral(k, h2, tau)
    np.testing.assert_allclose(lhs, rhs, atol=1e-13)


@given(st.integers(1, 40))
def test_transport_exactness_for_any_step_count(n):
    k = K.exponential()
    f = lambda t: np.multiply.outer(np.asarray(t) * np.exp(-np.asarray(t)), np.ones(4))
    s0 = state_from_function(MESH, f, 0.1, 10.0, k)
    s = s0
    for _ in range(n):
        s = evolve_state(s, k, np.zeros(4), 0.1)
    np.testing.assert_array_equal(s.values[:-n], s0.values[n:])
    np.testing.assert_allclose(s.values[-n:, 0], f(s.tau[-n:] + n * 0.1)[:, 0], rtol=1e-13)
