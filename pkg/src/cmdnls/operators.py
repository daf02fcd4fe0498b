"""Operators acting on Hardy fields: D, Toeplitz, the Lax pair, G and its resolvent, the
zero-frequency trace and the free Schrodinger group.

Products are dealiased with the 2/3 rule and projected back with the Szego projector.
Where a projection discards content, its norm can be requested with
``return_residual=True``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import sici

from .grid import (
    Field,
    GridSpec,
    HardyField,
    check_upper,
    dealiased_product,
    negative_part_norm,
    poisson_eval,
    project_coeffs,
)


def _like(f: Field, coeffs: np.ndarray) -> Field:
    """Rebuild a field of the same kind as ``f`` from coefficients."""
    if isinstance(f, HardyField):
        return HardyField.from_coeffs(f.grid, project_coeffs(f.grid, coeffs))
    return Field.from_coeffs(f.grid, coeffs)


def _project_samples(grid: GridSpec, samples: np.ndarray) -> tuple[HardyField, float]:
    raw = Field(grid, samples)
    return HardyField.from_coeffs(grid, project_coeffs(grid, raw.coeffs)), negative_part_norm(raw)


def _same_grid(*fields: Field) -> GridSpec:
    g = fields[0].grid
    for f in fields[1:]:
        if f.grid != g:
            raise ValueError("grid mismatch")
    return g


def derivative_D(f: Field) -> Field:
    """D = -i d/dx, the multiplier xi."""
    return _like(f, f.coeffs * f.grid.xi)


def derivative_x(f: Field) -> Field:
    """d/dx, the multiplier i xi."""
    return Field.from_coeffs(f.grid, 1j * f.grid.xi * f.coeffs)


def schrodinger_propagate(f: Field, t: float) -> Field:
    """exp(i t d^2/dx^2) as the multiplier exp(-i t xi^2)."""
    if t == 0:
        return f
    return _like(f, f.coeffs * np.exp(-1j * t * f.grid.xi**2))


def toeplitz_apply(b: Field, f: Field, dealias: bool = True, return_residual: bool = False):
    """T_b f = Pi(b f)."""
    g = _same_grid(b, f)
    out, res = _project_samples(g, dealiased_product(g, b.values, f.values, dealias=dealias))
    return (out, res) if return_residual else out


def _uTbar(u: Field, f: Field, dealias: bool) -> tuple[HardyField, float]:
    """u T_{conj u} f, re-projected."""
    g = u.grid
    inner = toeplitz_apply(u.conj(), f, dealias=dealias)
    return _project_samples(g, dealiased_product(g, u.values, inner.values, dealias=dealias))


def lax_L_apply(u: Field, f: Field, dealias: bool = True, return_residual: bool = False):
    """L_u f = D f + u T_{conj u} f."""
    _same_grid(u, f)
    nl, res = _uTbar(u, f, dealias)
    out = HardyField.from_coeffs(
        f.grid, project_coeffs(f.grid, f.coeffs * f.grid.xi) + nl.coeffs
    )
    return (out, res) if return_residual else out


def lax_B_apply(
    u: Field, du: Field, f: Field, dealias: bool = True, return_residual: bool = False
):
    """B_u f = -u T_{d conj u} f + (du) T_{conj u} f + i (u T_{conj u})^2 f.

    ``du`` is the x-derivative of ``u``.
    """
    g = _same_grid(u, du, f)
    t1, r1 = _project_samples(
        g,
        dealiased_product(
            g, u.values, toeplitz_apply(du.conj(), f, dealias=dealias).values, dealias=dealias
        ),
    )
    t2, r2 = _project_samples(
        g,
        dealiased_product(
            g, du.values, toeplitz_apply(u.conj(), f, dealias=dealias).values, dealias=dealias
        ),
    )
    s1, r3 = _uTbar(u, f, dealias)
    s2, r4 = _uTbar(u, s1, dealias)
    out = HardyField.from_coeffs(g, -t1.coeffs + t2.coeffs + 1j * s2.coeffs)
    return (out, r1 + r2 + r3 + r4) if return_residual else out


def g_resolvent(f: Field, z: complex, return_residual: bool = False):
    """(G - z)^{-1} f as the projected difference quotient (f(x) - f(z)) / (x - z)."""
    z = check_upper(z)
    fz = poisson_eval(f, z)
    out, res = _project_samples(f.grid, (f.values - fz) / (f.grid.x - z))
    return (out, res) if return_residual else out


# trace functional -----------------------------------------------------------


def _trace_design(grid: GridSpec, m: int, degree: int) -> np.ndarray:
    k = np.arange(m + 1)
    xi = grid.dxi * k
    s = np.pi / 2 - sici(np.pi * k)[0]
    alt = np.where(k % 2 == 0, 1.0, -1.0)
    # a jump of the spectrum at 0 leaves a slowly decaying tail in x; its window
    # truncation (and the half-open sample endpoint) produces an alternating sawtooth
    saw = -s / np.pi - alt * 1j * grid.dx / (2 * np.pi * grid.L)
    # next order of the same truncation, from a 1/x^2 tail
    tail2 = (alt - np.pi * k * s) / (np.pi * grid.L)
    cols = [xi**p for p in range(degree + 1)] + [saw, tail2]
    return np.array(cols, dtype=complex).T


def _trace_fit(grid: GridSpec, c: np.ndarray, m: int, degree: int) -> complex:
    m = min(m, grid.K - 1)
    if m < degree + 3:
        raise ValueError("too few modes for the trace fit")
    A = _trace_design(grid, m, degree)
    y = 2.0 * grid.L * np.asarray(c)[: m + 1]
    sol, *_ = np.linalg.lstsq(A, y, rcond=None)
    return complex(sol[0])


def i_plus(f: Field, m: int = 12, degree: int = 4, full_output: bool = False):
    """Zero-frequency trace hat f(0+).

    The low coefficients 2L c_k, k = 0..m, are fitted by a polynomial in xi plus the
    two window-truncation profiles a spectral jump at xi = 0 leaves on the torus.
    The polynomial's value at 0 is returned.  This reproduces integral f for data
    that are periodic on the window, and the one-sided limit for line data with a
    1/x tail.  With ``full_output`` the spread against a wider, higher-degree fit
    is returned as well.  A background constant is not removed; pass fluctuations.
    """
    value = _trace_fit(f.grid, f.coeffs, m, degree)
    if not full_output:
        return value
    alt = _trace_fit(f.grid, f.coeffs, m + 4, degree + 1)
    return value, abs(alt - value)


def i_plus_coeffs(grid: GridSpec, c: np.ndarray) -> complex:
    """Trace read off a frequency-difference discretization: 2L c_0."""
    return complex(2.0 * grid.L * c[0])


def reproduce_at(f: Field, z: complex, **fit_kw) -> complex:
    """f(z) recovered as I_+((G - z)^{-1} f) / (2 i pi)."""
    return i_plus(g_resolvent(f, z), **fit_kw) / (2j * np.pi)


# dense frequency-space operators -------------------------------------------------


@dataclass(frozen=True, eq=False)
class FreqOperator:
    """K x K matrix acting on Hardy coefficients c_0..c_{K-1}."""

    grid: GridSpec
    matrix: np.ndarray

    def __post_init__(self):
        K = self.grid.K
        if self.matrix.shape != (K, K):
            raise ValueError(f"expected a {K}x{K} matrix, got {self.matrix.shape}")
        self.matrix.setflags(write=False)

    def apply(self, c: np.ndarray) -> np.ndarray:
        return self.matrix @ c

    def __call__(self, f: HardyField) -> HardyField:
        return HardyField.from_hardy_coeffs(self.grid, self.apply(f.hardy_coeffs))

    def __add__(self, other: "FreqOperator") -> "FreqOperator":
        return FreqOperator(self.grid, self.matrix + other.matrix)

    def __mul__(self, s: complex) -> "FreqOperator":
        return FreqOperator(self.grid, self.matrix * s)

    __rmul__ = __mul__


def g_matrix(grid: GridSpec) -> FreqOperator:
    """Forward difference i (c_{k+1} - c_k) / dxi with c_K = 0."""
    K = grid.K
    M = (np.eye(K, k=1) - np.eye(K)) * (1j / grid.dxi)
    return FreqOperator(grid, M.astype(complex))


def d_matrix(grid: GridSpec) -> FreqOperator:
    return FreqOperator(grid, np.diag(grid.hardy_xi).astype(complex))


def hardy_columns_apply(grid: GridSpec, op, batch: int = 256) -> np.ndarray:
    """Dense matrix of a linear map on Hardy coefficients, built column block by block.

    ``op`` maps an (n, N) array of full coefficient vectors to an (n, N) array.
    """
    K = grid.K
    M = np.empty((K, K), dtype=complex)
    for start in range(0, K, batch):
        stop = min(K, start + batch)
        E = np.zeros((stop - start, grid.N), dtype=complex)
        E[np.arange(stop - start), np.arange(start, stop)] = 1.0
        M[:, start:stop] = op(E)[:, :K].T
    return M


def toeplitz_pair_coeffs(u: Field, C: np.ndarray, dealias: bool = True) -> np.ndarray:
    """Coefficients of T_u T_{conj u} applied to each row of ``C``."""
    g = u.grid
    mask = g.dealias_mask if dealias else np.ones(g.N, dtype=bool)
    pos = g.positive & mask
    us = g.to_samples(u.coeffs * mask)

    def mult(b, C):
        return g.to_coeffs(b * g.to_samples(C * mask)) * pos

    return mult(us, mult(us.conj(), C))


def toeplitz_pair_matrix(u: Field, dealias: bool = True) -> FreqOperator:
    return FreqOperator(u.grid, hardy_columns_apply(u.grid, lambda C: toeplitz_pair_coeffs(u, C, dealias)))


def lax_L_matrix(u: Field, dealias: bool = True) -> FreqOperator:
    return d_matrix(u.grid) + toeplitz_pair_matrix(u, dealias)
