import numpy as np
import pytest
from hypothesis import given, strategies as st

from cmdnls.grid import (
    Field,
    HardyField,
    dealiased_product,
    hilbert_transform,
    inner,
    l2_norm,
    make_grid,
    poisson_eval,
    poisson_quadrature,
    project_coeffs,
    szego_project,
)
from conftest import random_field

sizes = st.sampled_from([8, 16, 64, 256, 2**14])
seeds = st.integers(0, 2**32 - 1)


def mode(grid, k):
    return Field(grid, np.exp(1j * grid.dxi * k * grid.x))


def test_make_grid_small():
    g = make_grid(np.pi, 8)
    assert g.dx == pytest.approx(np.pi / 4)
    assert sorted(g.xi) == pytest.approx(np.arange(-4, 4))
    assert g.x[0] == -np.pi


def test_make_grid_spacing():
    g = make_grid(50, 1024)
    assert g.dx == pytest.approx(0.09765625)
    assert g.xi[1] == pytest.approx(np.pi / 50)


@pytest.mark.parametrize("L,N", [(np.pi, 7), (np.pi, 6), (0.0, 8), (-1.0, 8), (1.0, 9)])
def test_make_grid_rejects(L, N):
    with pytest.raises(ValueError):
        make_grid(L, N)


def test_hardy_truncation_keeps_nonnegative_modes():
    g = make_grid(1.0, 16)
    assert list(g.k[: g.K]) == list(range(8))
    assert g.k[g.K] == -8


def test_field_is_immutable():
    g = make_grid(1.0, 8)
    f = Field(g, np.ones(8))
    with pytest.raises(ValueError):
        f.values[0] = 2.0
    with pytest.raises(ValueError):
        f.coeffs[0] = 2.0


def test_single_mode_coefficient(torus_pi):
    c = mode(torus_pi, 3).coeffs
    expected = np.zeros(torus_pi.N)
    expected[3] = 1.0
    assert np.allclose(c, expected, atol=1e-14)


@given(sizes, seeds)
def test_round_trip_and_parseval(N, seed):
    g = make_grid(3.0, N)
    f = random_field(g, seed)
    back = g.to_samples(f.coeffs)
    scale = np.linalg.norm(f.values)
    assert np.linalg.norm(back - f.values) <= 1e-12 * scale
    lhs = np.sum(np.abs(f.values) ** 2) * g.dx
    rhs = 2 * g.L * np.sum(np.abs(f.coeffs) ** 2)
    assert abs(lhs - rhs) <= 1e-12 * lhs


def test_szego_examples(torus_pi):
    g = torus_pi
    assert np.allclose(szego_project(mode(g, -1)).values, 0, atol=1e-14)
    assert np.allclose(szego_project(Field.constant(g)).values, 1, atol=1e-14)
    cos = Field(g, np.cos(g.x))
    assert np.allclose(szego_project(cos).values, 0.5 * np.exp(1j * g.x), atol=1e-14)


@given(st.sampled_from([8, 16, 64, 256]), seeds, seeds)
def test_szego_idempotent_and_self_adjoint(N, s1, s2):
    g = make_grid(2.0, N)
    f, h = random_field(g, s1), random_field(g, s2)
    once = project_coeffs(g, f.coeffs)
    assert np.array_equal(project_coeffs(g, once), once)
    Pf = szego_project(f)
    assert np.allclose(szego_project(Pf).coeffs, Pf.coeffs, rtol=0, atol=1e-14 * np.abs(f.coeffs).max())
    a = inner(Pf, h)
    b = inner(f, szego_project(h))
    assert abs(a - b) <= 1e-12 * l2_norm(f) * l2_norm(h)


@given(st.sampled_from([8, 16, 64, 256]), seeds)
def test_pi_equals_half_id_plus_iH_on_mean_zero(N, seed):
    g = make_grid(2.0, N)
    c = random_field(g, seed).coeffs.copy()
    c[0] = 0.0
    c[N // 2] = 0.0  # the unpaired mode has no conjugate partner
    f = Field.from_coeffs(g, c)
    lhs = szego_project(f).coeffs
    rhs = 0.5 * (f.coeffs + 1j * hilbert_transform(f).coeffs)
    assert np.allclose(lhs, rhs, rtol=0, atol=1e-14 * np.abs(c).max())


def test_hilbert_examples(torus_pi):
    g = torus_pi
    assert np.allclose(hilbert_transform(Field(g, np.cos(g.x))).values, np.sin(g.x), atol=1e-14)
    assert np.allclose(hilbert_transform(Field.constant(g)).values, 0, atol=1e-14)
    assert np.allclose(hilbert_transform(Field(g, np.sin(g.x))).values, -np.cos(g.x), atol=1e-14)


def test_hardy_field_validation():
    g = make_grid(1.0, 16)
    HardyField(g, np.exp(1j * g.dxi * g.x))
    with pytest.raises(ValueError):
        HardyField(g, np.exp(-1j * g.dxi * g.x))


def test_poisson_constant_and_mode():
    g = make_grid(np.pi, 32)
    assert poisson_eval(Field.constant(g), 0.3 + 2j) == pytest.approx(1.0)
    assert poisson_eval(mode(g, 1), 1j) == pytest.approx(np.exp(-1.0))


@given(st.integers(0, 15), st.floats(-3, 3), st.floats(0.01, 3))
def test_poisson_single_mode_exact(k, re, im):
    g = make_grid(np.pi, 32)
    z = complex(re, im)
    c = np.zeros(g.N, dtype=complex)
    c[k] = 0.7 - 0.2j
    f = Field.from_coeffs(g, c)
    assert abs(poisson_eval(f, z) - c[k] * np.exp(1j * z * k)) <= 1e-13


def test_poisson_rejects_low_points():
    g = make_grid(np.pi, 32)
    with pytest.raises(ValueError):
        poisson_eval(Field.constant(g), 1.0 + 1e-4j)
    with pytest.raises(ValueError):
        poisson_eval(Field.constant(g), 1.0 - 1j)
    assert poisson_eval(Field.constant(g), 1.0 + 1e-4j, z_min=1e-5) == pytest.approx(1.0)


def test_poisson_rational_periodization():
    # holomorphic extension of 1/(x+i) is 1/(z+i); the error comes from the wrapped 1/x tail
    errs = []
    for L in (50.0, 200.0):
        g = make_grid(L, int(L * 40.96))
        f = Field(g, 1 / (g.x + 1j))
        errs.append(abs(poisson_eval(f, 2j) - (-1j / 3)))
    assert errs[0] < 5e-3
    assert errs[1] < 1.2e-3
    assert errs[0] / errs[1] > 3.5


def test_poisson_matches_kernel_quadrature():
    g = make_grid(40.0, 4096)
    f = szego_project(Field(g, np.exp(-(g.x**2))))
    for z in (0.5j, 1j, 1 + 2j):
        assert abs(poisson_eval(f, z) - poisson_quadrature(f, z)) < 1e-2


def test_dealiased_product_masks():
    g = make_grid(np.pi, 24)
    a = np.exp(1j * 5 * g.x)
    out = dealiased_product(g, a, a)
    assert np.allclose(out, 0, atol=1e-14)  # mode 10 > N/3 = 8
    b = np.exp(1j * 3 * g.x)
    assert np.allclose(dealiased_product(g, b, b), np.exp(6j * g.x), atol=1e-13)
    assert np.allclose(dealiased_product(g, a, a, dealias=False), a * a)
