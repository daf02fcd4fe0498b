"""Catalog of initial data with unit-modulus background."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .grid import Field, GridSpec, HardyField, project_coeffs

KINDS = ("constant", "rational", "gaussian_bump", "multi_bump")


class PeriodizationWarning(UserWarning):
    pass


@dataclass(frozen=True)
class InitialDatum:
    """u0 = c + sum_j a_j phi_j with every profile phi_j Szego-projected on the grid.

    rational:       phi_j = 1 / (x - x_j + i b_j), b_j > 0
    gaussian_bump:  phi_j = exp(-((x - x_j) / b_j)^2)
    multi_bump:     same profile as gaussian_bump, several centres
    """

    kind: str = "gaussian_bump"
    c: complex = 1.0
    amplitudes: tuple[complex, ...] = (0.1,)
    widths: tuple[float, ...] = (1.0,)
    offsets: tuple[float, ...] = (0.0,)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown datum kind {self.kind!r}")
        if abs(abs(complex(self.c)) - 1.0) > 1e-12:
            raise ValueError("background constant must be unimodular")
        for name in ("amplitudes", "widths", "offsets"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if self.kind != "constant":
            n = len(self.amplitudes)
            if n == 0 or len(self.widths) != n or len(self.offsets) != n:
                raise ValueError("amplitudes, widths and offsets must have equal nonzero length")
        if self.kind == "rational" and any(b <= 0 for b in self.widths):
            raise ValueError("rational poles must lie in the lower half-plane (b > 0)")
        if self.kind in ("gaussian_bump", "multi_bump") and any(b <= 0 for b in self.widths):
            raise ValueError("bump widths must be positive")

    def profile(self, x: np.ndarray) -> np.ndarray:
        """Unprojected perturbation sum a_j phi_j(x)."""
        out = np.zeros_like(x, dtype=complex)
        if self.kind == "constant":
            return out
        for a, b, x0 in zip(self.amplitudes, self.widths, self.offsets):
            if self.kind == "rational":
                out += a / (x - x0 + 1j * b)
            else:
                out += a * np.exp(-(((x - x0) / b) ** 2))
        return out


def build_datum(d: InitialDatum, grid: GridSpec) -> HardyField:
    if d.kind == "constant":
        return HardyField.constant(grid, complex(d.c))
    if d.kind == "rational":
        ratio = grid.L / max(d.widths)
        if ratio < 50:
            warnings.warn(
                f"L/b = {ratio:.3g} < 50: the 1/x tail of rational data is poorly resolved "
                "on this window",
                PeriodizationWarning,
                stacklevel=2,
            )
    pert = Field(grid, d.profile(grid.x))
    c = project_coeffs(grid, pert.coeffs)
    c[0] += complex(d.c)
    return HardyField.from_coeffs(grid, c)


def catalog() -> dict[str, InitialDatum]:
    """The standard test suite."""
    return {
        "constant": InitialDatum("constant"),
        "rotated_constant": InitialDatum("constant", c=np.exp(0.7j)),
        "gaussian": InitialDatum("gaussian_bump", amplitudes=(0.1,), widths=(1.0,), offsets=(0.0,)),
        "two_bump": InitialDatum(
            "multi_bump", amplitudes=(0.1, 0.05j), widths=(1.0, 1.5), offsets=(-2.0, 3.0)
        ),
        "rational": InitialDatum("rational", amplitudes=(0.1,), widths=(1.0,), offsets=(0.0,)),
    }
