"""Periodized discretization of the line, spectral transforms and Hardy-space tools.

The line is replaced by the torus [-L, L) sampled at N points.  A field is stored
by its samples; its spectral view is the coefficient vector ``c`` (FFT order)
with ``u(x) = sum_k c_k exp(i xi_k x)`` and ``xi_k = pi k / L``.

The Hardy (chiral) part of a field is the set of modes ``k = 0 .. N/2 - 1``.
The constant background lives in the zero mode and is kept by the Szego
projector; the Hilbert transform annihilates it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import fft as sfft

SPECTRAL_TOL = 1e-12
Z_MIN = 1e-3


@dataclass(frozen=True)
class GridSpec:
    """Torus [-L, L) with N equispaced samples."""

    L: float
    N: int

    def __post_init__(self):
        if not np.isfinite(self.L) or self.L <= 0:
            raise ValueError(f"half-length must be positive, got {self.L}")
        if int(self.N) != self.N or self.N % 2 or self.N < 8:
            raise ValueError(f"N must be an even integer >= 8, got {self.N}")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "L", float(self.L))

    @property
    def dx(self) -> float:
        return 2.0 * self.L / self.N

    @property
    def dxi(self) -> float:
        return np.pi / self.L

    @property
    def K(self) -> int:
        """Number of Hardy modes."""
        return self.N // 2

    @cached_property
    def x(self) -> np.ndarray:
        return _frozen(-self.L + self.dx * np.arange(self.N))

    @cached_property
    def k(self) -> np.ndarray:
        """Integer wavenumbers in FFT order."""
        return _frozen(np.fft.fftfreq(self.N, 1.0 / self.N).astype(np.int64))

    @cached_property
    def xi(self) -> np.ndarray:
        return _frozen(self.dxi * self.k)

    @cached_property
    def hardy_xi(self) -> np.ndarray:
        return _frozen(self.xi[: self.K].copy())

    @cached_property
    def _sign(self) -> np.ndarray:
        # (-1)^k, from the x_0 = -L origin of the sample grid
        return _frozen(np.where(self.k % 2 == 0, 1.0, -1.0))

    @cached_property
    def positive(self) -> np.ndarray:
        return _frozen(self.k >= 0)

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        """2/3 rule: keep |k| <= N/3, drop the unpaired -N/2 mode."""
        mask = np.abs(self.k) <= self.N // 3
        mask[self.N // 2] = False
        return _frozen(mask)

    def to_coeffs(self, samples: np.ndarray) -> np.ndarray:
        """Samples -> coefficients along the last axis."""
        return sfft.fft(samples, axis=-1) * (self._sign / self.N)

    def to_samples(self, coeffs: np.ndarray) -> np.ndarray:
        return sfft.ifft(coeffs * (self._sign * self.N), axis=-1)

    def hardy_to_full(self, hc: np.ndarray) -> np.ndarray:
        """Embed Hardy coefficients (k = 0 .. K-1) into a full FFT-order vector."""
        hc = np.asarray(hc)
        full = np.zeros(hc.shape[:-1] + (self.N,), dtype=complex)
        full[..., : self.K] = hc
        return full


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def make_grid(L: float, N: int) -> GridSpec:
    return GridSpec(L, N)


@dataclass(frozen=True, eq=False)
class Field:
    """Complex samples on a grid.  Immutable; the spectral view is cached."""

    grid: GridSpec
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=complex)
        if v.shape != (self.grid.N,):
            raise ValueError(f"expected {self.grid.N} samples, got shape {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_coeffs(cls, grid: GridSpec, coeffs: np.ndarray):
        return cls(grid, grid.to_samples(np.asarray(coeffs, dtype=complex)))

    @classmethod
    def from_function(cls, grid: GridSpec, func):
        return cls(grid, func(grid.x))

    @classmethod
    def constant(cls, grid: GridSpec, c: complex = 1.0):
        return cls(grid, np.full(grid.N, c, dtype=complex))

    @cached_property
    def coeffs(self) -> np.ndarray:
        return _frozen(self.grid.to_coeffs(self.values))

    @property
    def hardy_coeffs(self) -> np.ndarray:
        return self.coeffs[: self.grid.K]

    def _check(self, other: "Field"):
        if other.grid != self.grid:
            raise ValueError("grid mismatch")

    def __add__(self, other):
        if isinstance(other, Field):
            self._check(other)
            return Field(self.grid, self.values + other.values)
        return Field(self.grid, self.values + other)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Field):
            self._check(other)
            return Field(self.grid, self.values - other.values)
        return Field(self.grid, self.values - other)

    def __rsub__(self, other):
        return Field(self.grid, other - self.values)

    def __neg__(self):
        return Field(self.grid, -self.values)

    def __mul__(self, scalar):
        if isinstance(scalar, Field):
            raise TypeError("use grid.product for pointwise products")
        return Field(self.grid, self.values * scalar)

    __rmul__ = __mul__

    def conj(self) -> "Field":
        return Field(self.grid, self.values.conj())


class HardyField(Field):
    """Field with no negative-frequency content (up to ``SPECTRAL_TOL``)."""

    def __post_init__(self):
        super().__post_init__()
        neg = self.coeffs[~self.grid.positive]
        scale = max(1.0, float(np.max(np.abs(self.coeffs))))
        if neg.size and np.max(np.abs(neg)) > SPECTRAL_TOL * scale:
            raise ValueError(
                f"negative-frequency content {np.max(np.abs(neg)):.3e} exceeds tolerance"
            )

    @classmethod
    def from_hardy_coeffs(cls, grid: GridSpec, hc: np.ndarray):
        return cls.from_coeffs(grid, grid.hardy_to_full(hc))


def as_hardy(f: Field) -> HardyField:
    if isinstance(f, HardyField):
        return f
    return HardyField(f.grid, f.values)


def check_upper(z: complex, z_min: float = Z_MIN) -> complex:
    z = complex(z)
    if not np.isfinite(z) or z.imag < z_min:
        raise ValueError(f"Im z = {z.imag:.3g} is below the floor {z_min:g}")
    return z


def inner(f: Field, g: Field) -> complex:
    """Discrete L2 inner product sum f conj(g) dx."""
    f._check(g)
    return complex(np.vdot(g.values, f.values) * f.grid.dx)


def l2_norm(f: Field | np.ndarray, grid: GridSpec | None = None) -> float:
    if isinstance(f, Field):
        grid, f = f.grid, f.values
    return float(np.sqrt(grid.dx) * np.linalg.norm(f))


def sup_norm(f: Field) -> float:
    return float(np.max(np.abs(f.values)))


def project_coeffs(grid: GridSpec, c: np.ndarray) -> np.ndarray:
    out = np.array(c, dtype=complex)
    out[..., ~grid.positive] = 0.0
    return out


def szego_project(f: Field) -> HardyField:
    return HardyField.from_coeffs(f.grid, project_coeffs(f.grid, f.coeffs))


def negative_part_norm(f: Field) -> float:
    """L2 norm of (Id - Pi) f."""
    c = f.coeffs[~f.grid.positive]
    return float(np.sqrt(2.0 * f.grid.L) * np.linalg.norm(c))


def hilbert_transform(f: Field) -> Field:
    g = f.grid
    return Field.from_coeffs(g, -1j * np.sign(g.k) * f.coeffs)


def dealiased_product(grid: GridSpec, *factors: np.ndarray, dealias: bool = True) -> np.ndarray:
    """Pointwise product of sample arrays, truncated by the 2/3 rule."""
    if not dealias:
        out = factors[0]
        for a in factors[1:]:
            out = out * a
        return out
    mask = grid.dealias_mask
    out = None
    for a in factors:
        a = grid.to_samples(grid.to_coeffs(a) * mask)
        out = a if out is None else out * a
    return grid.to_samples(grid.to_coeffs(out) * mask)


def poisson_eval_coeffs(grid: GridSpec, c: np.ndarray, z: complex) -> complex:
    hc = np.asarray(c)[..., : grid.K]
    return hc @ np.exp(1j * z * grid.hardy_xi)


def poisson_eval(f: Field, z: complex, z_min: float = Z_MIN) -> complex:
    """Holomorphic extension sum_{k >= 0} c_k exp(i z xi_k) of a Hardy field.

    The zero mode (background) is evaluated exactly as a constant.
    """
    z = check_upper(z, z_min)
    return complex(poisson_eval_coeffs(f.grid, f.coeffs, z))


def poisson_quadrature(f: Field, z: complex) -> complex:
    """Direct Poisson-kernel quadrature over the sampled window (an independent oracle)."""
    x = f.grid.x
    kernel = z.imag / (np.pi * np.abs(x - z) ** 2)
    return complex(np.sum(kernel * f.values) * f.grid.dx)
