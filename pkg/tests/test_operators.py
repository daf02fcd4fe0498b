import numpy as np
import pytest
from hypothesis import given, strategies as st

from cmdnls.grid import Field, HardyField, l2_norm, make_grid, poisson_eval, szego_project
from cmdnls.operators import (
    derivative_D,
    g_matrix,
    g_resolvent,
    i_plus,
    lax_B_apply,
    lax_L_apply,
    lax_L_matrix,
    reproduce_at,
    schrodinger_propagate,
    toeplitz_apply,
    toeplitz_pair_matrix,
)
from conftest import random_field

seeds = st.integers(0, 2**32 - 1)


def modes(grid, coeffs: dict):
    c = np.zeros(grid.N, dtype=complex)
    for k, v in coeffs.items():
        c[k] = v
    return c


def hardy(grid, coeffs: dict):
    return HardyField.from_coeffs(grid, modes(grid, coeffs))


def random_hardy(grid, seed, decay=0.3):
    return szego_project(random_field(grid, seed, decay))


def test_derivative_examples(torus_pi):
    g = torus_pi
    e1 = Field(g, np.exp(1j * g.x))
    assert np.allclose(derivative_D(e1).values, e1.values, atol=1e-13)
    assert np.allclose(derivative_D(Field.constant(g, 2.0)).values, 0, atol=1e-14)
    # D cos = -i d/dx cos = i sin
    assert np.allclose(derivative_D(Field(g, np.cos(g.x))).values, 1j * np.sin(g.x), atol=1e-13)


def test_toeplitz_examples(torus_pi):
    g = torus_pi
    em1 = Field(g, np.exp(-1j * g.x))
    assert np.allclose(toeplitz_apply(em1, hardy(g, {1: 1})).values, 1, atol=1e-14)
    assert np.allclose(toeplitz_apply(em1, Field.constant(g)).values, 0, atol=1e-14)
    # Pi kills the e^{-ix} part of conj(u0) = 1 + 0.1 e^{-ix}
    u0 = Field(g, 1 + 0.1 * np.exp(1j * g.x))
    assert np.allclose(toeplitz_apply(u0.conj(), Field.constant(g)).values, 1, atol=1e-14)


def test_lax_L_examples(torus_pi):
    g = torus_pi
    one = Field.constant(g)
    for k in (0, 1, 5):
        f = hardy(g, {k: 1})
        assert np.allclose(lax_L_apply(one, f).coeffs, (k + 1) * f.coeffs, atol=1e-13)
    f = hardy(g, {0: 0.3, 2: 1j})
    assert np.allclose(lax_L_apply(Field.constant(g, 0.0), f).values, derivative_D(f).values)
    u = Field(g, 1 + 0.1 * np.exp(1j * g.x))
    assert np.allclose(lax_L_apply(u, Field.constant(g)).values, u.values, atol=1e-14)


@given(seeds)
def test_lax_L_unit_background_is_D_plus_id(seed):
    g = make_grid(5.0, 64)
    f = random_hardy(g, seed, decay=1.0)
    tol = 1e-13 * np.abs(f.coeffs).max()
    out = lax_L_apply(Field.constant(g), f, dealias=False)
    assert np.allclose(out.coeffs, (g.xi + 1) * f.coeffs, rtol=0, atol=tol)
    # with the 2/3 rule the identity holds on the retained band
    band = HardyField.from_coeffs(g, f.coeffs * g.dealias_mask)
    out = lax_L_apply(Field.constant(g), band)
    assert np.allclose(out.coeffs, (g.xi + 1) * band.coeffs, rtol=0, atol=tol)


def test_lax_B_examples(torus_pi):
    g = torus_pi
    one = Field.constant(g)
    zero = Field.constant(g, 0.0)
    f = hardy(g, {0: 1.0, 3: 0.5j})
    assert np.allclose(lax_B_apply(one, zero, f).values, 1j * f.values, atol=1e-13)
    assert np.allclose(lax_B_apply(zero, zero, f).values, 0)


def test_lax_B_perturbed_background(torus_pi):
    # hand expansion for u = 1 + d e^{ix}, f = 1 (no truncation involved):
    #   -u T_{conj u_x} 1 = 0,  u_x T_{conj u} 1 = i d e^{ix},
    #   i (u T_{conj u})^2 1 = i u Pi(|u|^2) = i u (1 + d^2 + d e^{ix})
    g = torus_pi
    d = 0.1
    u = Field(g, 1 + d * np.exp(1j * g.x))
    du = Field(g, 1j * d * np.exp(1j * g.x))
    expected = modes(g, {0: 1j * (1 + d**2), 1: 1j * d * (3 + d**2), 2: 1j * d**2})
    out = lax_B_apply(u, du, Field.constant(g))
    assert np.allclose(out.coeffs, expected, atol=1e-14)


def test_projection_residual_reported(torus_pi):
    g = torus_pi
    u = Field(g, 1 + 0.1 * np.exp(-1j * g.x))  # not chiral: u Pi(...) leaks
    _, res = lax_L_apply(u, hardy(g, {0: 1}), return_residual=True)
    assert res > 1e-3
    _, res = lax_L_apply(Field.constant(g), hardy(g, {2: 1}), return_residual=True)
    assert res < 1e-14


def test_resolvent_examples():
    g = make_grid(50.0, 2048)
    assert np.allclose(g_resolvent(Field.constant(g, 0.0), 1j).values, 0)
    assert np.allclose(g_resolvent(Field.constant(g, 2.5), 1j).values, 0, atol=1e-15)


def test_resolvent_partial_fraction():
    # (1/(x+i) - 1/(2i)) / (x - i) = (i/2) / (x + i); compare on the bulk of the window
    g = make_grid(200.0, 2**14)
    f = Field(g, 1 / (g.x + 1j))
    out = g_resolvent(f, 1j)
    expected = 0.5j / (g.x + 1j)
    bulk = np.abs(g.x) < 20
    assert np.max(np.abs(out.values - expected)[bulk]) < 2e-3


@given(seeds, st.floats(-2, 2), st.floats(0.2, 3))
def test_resolvent_pointwise_identity(seed, re, im):
    g = make_grid(10.0, 128)
    f = random_hardy(g, seed)
    z = complex(re, im)
    fz = poisson_eval(f, z)
    raw = (f.values - fz) / (g.x - z)
    assert np.max(np.abs((g.x - z) * raw + fz - f.values)) <= 1e-10 * max(1, np.abs(f.values).max())


def test_schrodinger_examples(torus_pi):
    g = torus_pi
    t = 0.37
    f = hardy(g, {3: 1})
    assert np.allclose(schrodinger_propagate(f, t).values, np.exp(-9j * t) * f.values)
    c = Field.constant(g, 0.4 - 0.3j)
    assert np.allclose(schrodinger_propagate(c, t).values, c.values)
    assert schrodinger_propagate(f, 0.0) is f


@given(seeds, st.floats(-5, 5), st.floats(-5, 5))
def test_schrodinger_unitary_and_group(seed, s, t):
    g = make_grid(7.0, 128)
    f = random_field(g, seed)
    n0 = l2_norm(f)
    assert abs(l2_norm(schrodinger_propagate(f, t)) - n0) <= 1e-12 * n0
    a = schrodinger_propagate(schrodinger_propagate(f, s), t).coeffs
    b = schrodinger_propagate(f, s + t).coeffs
    assert np.allclose(a, b, rtol=0, atol=1e-12 * np.abs(f.coeffs).max())


def test_g_matrix_structure():
    g = make_grid(5.0, 16)
    G = g_matrix(g)
    c = np.zeros(g.K, dtype=complex)
    c[0] = 1.0
    out = G.apply(c)
    assert out[0] == pytest.approx(-1j / g.dxi)
    assert np.allclose(out[1:], 0)
    flat = G.apply(np.full(g.K, 2.0 + 0j))
    assert np.allclose(flat[:-1], 0)
    assert flat[-1] == pytest.approx(-2j / g.dxi)


@given(seeds)
def test_g_matrix_dissipative(seed):
    g = make_grid(5.0, 64)
    rng = np.random.default_rng(seed)
    c = rng.standard_normal(g.K) + 1j * rng.standard_normal(g.K)
    assert np.vdot(c, g_matrix(g).apply(c)).imag <= 1e-12 * np.vdot(c, c).real / g.dxi


def test_trace_identity_converges():
    # |I_+(f)|^2 against -4 pi (2L) Im <G_h c, c>: the gap is first order in dxi
    gaps = []
    for L in (25.0, 50.0, 100.0):
        g = make_grid(L, int(L * 20.48))
        f = szego_project(Field(g, np.exp(-(g.x**2))))
        c = f.hardy_coeffs
        form = -4 * np.pi * 2 * L * np.vdot(c, g_matrix(g).apply(c)).imag
        gaps.append(abs(form - abs(i_plus(f)) ** 2))
    rates = np.log2(np.array(gaps[:-1]) / np.array(gaps[1:]))
    assert np.all(rates > 0.9)


def test_i_plus_examples():
    g = make_grid(200.0, 2**14)
    assert abs(i_plus(Field(g, 1 / (g.x + 1j))) + 2j * np.pi) < 1e-4
    assert i_plus(Field.constant(g, 0.0)) == 0


def test_i_plus_matches_quadrature_on_window_periodic_data():
    # for a projected Gaussian the torus data are periodic: the integral over the window
    # (trapezoid = 2L c_0) is the reference.  It is sqrt(pi), the full Gaussian mass.
    g = make_grid(50.0, 2048)
    f = szego_project(Field(g, np.exp(-(g.x**2))))
    quad = np.sum(f.values) * g.dx
    assert quad.real == pytest.approx(np.sqrt(np.pi), abs=1e-12)
    val, spread = i_plus(f, full_output=True)
    assert abs(val - quad) < 1e-4
    assert spread < 1e-4


def test_reproduce_rational():
    g = make_grid(200.0, 2**14)
    f = Field(g, 1 / (g.x + 1j))
    assert abs(reproduce_at(f, 1j) + 0.5j) < 1e-4
    assert reproduce_at(Field.constant(g, 0.0), 1j) == 0


def test_frequency_matrices_match_field_operators():
    g = make_grid(10.0, 64)
    u = Field(g, 1 + 0.2 * np.exp(-(g.x**2)))
    u = HardyField.from_coeffs(g, szego_project(u).coeffs)
    f = random_hardy(g, 3)
    M = lax_L_matrix(u)
    assert np.allclose(M(f).coeffs, lax_L_apply(u, f).coeffs, atol=1e-12)
    T = toeplitz_pair_matrix(u)
    direct = toeplitz_apply(u, toeplitz_apply(u.conj(), f))
    assert np.allclose(T(f).coeffs, direct.coeffs, atol=1e-12)
    assert np.allclose(g_matrix(g).matrix.diagonal(), -1j / g.dxi)
