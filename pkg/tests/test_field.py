import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from viscomem.field import (
    Field, Mesh, channel_force_potential, curl_scalar, divergence, effective_state_source, gradient,
    helmholtz_decompose, skew_from_stream,
)


def test_mesh_shapes(channel, periodic):
    assert channel.velocity_shape == (33,) and channel.gradient_shape == (32,)
    assert periodic.velocity_shape == (2, 16, 16) and periodic.gradient_shape == (2, 2, 16, 16)
    assert channel.measure == pytest.approx(1.0)
    assert periodic.measure == pytest.approx(4 * np.pi**2)


def test_mesh_rejects_unknown_kind():
    with pytest.raises(ValueError):
        Mesh("sphere", 8)


def test_channel_gradient_divergence_adjoint(channel):
    rng = np.random.default_rng(1)
    v = rng.standard_normal(33)
    v[[0, -1]] = 0.0
    q = rng.standard_normal(32)
    # <grad v, q> = -<v, div q> for v vanishing at the walls
    lhs = channel.inner(channel.grad(v), q)
    rhs = -channel.node_inner(v, channel.div(q))
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_channel_poisson_is_exact_for_quadratics(channel):
    # constant unit force: A' = 1, data J = -A
    A = channel_force_potential(channel, np.ones(33))
    v = channel.solve_unit(-A)
    y = channel.nodes
    np.testing.assert_allclose(v, y * (1 - y) / 2, atol=1e-14)


def test_channel_solve_satisfies_weak_form(channel):
    rng = np.random.default_rng(2)
    J = rng.standard_normal((3, 32))
    v = channel.solve_unit(J)
    assert np.all(v[:, [0, -1]] == 0.0)
    w = rng.standard_normal(33)
    w[[0, -1]] = 0.0
    res = channel.inner(channel.grad(v) - J, channel.grad(w))
    np.testing.assert_allclose(res, 0.0, atol=1e-12)


def test_channel_solve_ignores_constants(channel):
    J = np.sin(np.arange(32.0))
    np.testing.assert_allclose(channel.solve_unit(J + 3.0), channel.solve_unit(J), atol=1e-13)


def test_periodic_solution_is_solenoidal_and_balanced(periodic):
    rng = np.random.default_rng(3)
    J = rng.standard_normal((2, 2, 16, 16))
    v = periodic.solve_unit(J)
    assert np.abs(periodic.div(v)).max() < 1e-12
    assert np.abs(v.mean(axis=(-2, -1))).max() < 1e-13
    resid = periodic.div(periodic.grad(v) - J)
    # the residual is a pressure gradient: its Leray projection vanishes
    assert np.abs(periodic.project(resid)).max() < 1e-11


def test_periodic_single_mode(periodic):
    # J = [[0, s], [0, 0]] with s = cos y: div J = (-sin y, 0); v = -sin y e_x solves Lap v = div J
    x, y = periodic.grid
    J = np.zeros((2, 2, 16, 16))
    J[0, 1] = np.cos(y)
    v = periodic.solve_unit(J)
    np.testing.assert_allclose(v[0], np.sin(y), atol=1e-13)
    np.testing.assert_allclose(v[1], 0.0, atol=1e-13)


def test_complex_batch_solve(periodic):
    rng = np.random.default_rng(4)
    Jr, Ji = rng.standard_normal((2, 2, 2, 16, 16))
    out = periodic.solve_unit(Jr + 1j * Ji)
    np.testing.assert_allclose(out, periodic.solve_unit(Jr) + 1j * periodic.solve_unit(Ji), atol=1e-13)


def test_projection_is_idempotent(periodic):
    rng = np.random.default_rng(5)
    v = rng.standard_normal((2, 16, 16))
    p = periodic.project(v)
    np.testing.assert_allclose(periodic.project(p), p, atol=1e-13)


def test_helmholtz_reconstruction(periodic):
    x, y = periodic.grid
    f = np.stack([np.sin(y) + np.cos(x) + 0.5, np.sin(2 * x) * np.cos(y) - 0.25])
    d = helmholtz_decompose(periodic, f)
    np.testing.assert_allclose(d.solenoidal + d.irrotational + d.residual, f, atol=1e-13)
    np.testing.assert_allclose(curl_scalar(periodic, d.stream), d.solenoidal, atol=1e-12)
    assert np.abs(periodic.div(d.solenoidal)).max() < 1e-12
    np.testing.assert_allclose(periodic.grad(d.potential), d.irrotational, atol=1e-12)
    np.testing.assert_allclose(d.mean_removed, [0.5, -0.25], atol=1e-14)
    np.testing.assert_allclose(periodic.div(d.skew), d.solenoidal, atol=1e-12)


def test_helmholtz_rejects_channel(channel):
    with pytest.raises(ValueError):
        helmholtz_decompose(channel, np.zeros(33))


def test_skew_from_stream_is_antisymmetric():
    a = np.arange(16.0).reshape(4, 4)
    A = skew_from_stream(a)
    np.testing.assert_array_equal(A, -np.swapaxes(A, 0, 1))


def test_channel_force_potential_weak_identity(channel):
    rng = np.random.default_rng(6)
    g = rng.standard_normal(33)
    A = channel_force_potential(channel, g)
    assert abs(A.mean()) < 1e-15
    w = rng.standard_normal(33)
    w[[0, -1]] = 0.0
    assert channel.node_inner(g, w) == pytest.approx(-channel.inner(A, channel.grad(w)), rel=1e-12)


def test_effective_state_source_shapes():
    assert np.all(effective_state_source(np.ones(4), np.ones(4)) == 0)
    with pytest.raises(ValueError):
        effective_state_source(np.ones(4), np.ones(5))


def test_field_wrappers_and_csv(channel, tmp_path):
    f = Field(channel, channel.nodes**2)
    g = gradient(channel, f)
    assert g.location == "cell"
    np.testing.assert_allclose(g.values, 2 * channel.centres, atol=1e-14)
    assert divergence(channel, g).values.shape == (33,)
    f.to_csv(tmp_path / "f.csv")
    rows = (tmp_path / "f.csv").read_text().splitlines()
    assert rows[0] == "y,c0" and len(rows) == 34


@given(arrays(float, (2, 32), elements=st.floats(-10, 10)), st.floats(-3, 3))
def test_channel_solve_is_linear(J, c):
    m = Mesh("channel1d", 32)
    a = m.solve_unit(J[0] + c * J[1])
    b = m.solve_unit(J[0]) + c * m.solve_unit(J[1])
    assert np.abs(a - b).max() <= 1e-10 * (1 + np.abs(J).max())
