"""Conserved functionals, norms, the gauge transform and inequality checks."""

from __future__ import annotations

from dataclasses import dataclass, astuple, fields

import numpy as np

from .evolve import Trajectory
from .grid import (
    Field,
    GridSpec,
    dealiased_product,
    hilbert_transform,
    inner,
    l2_norm,
    negative_part_norm,
    project_coeffs,
)
from .operators import derivative_x, lax_B_apply, lax_L_apply


def _coeff_norm(grid: GridSpec, c: np.ndarray) -> float:
    return float(np.sqrt(2.0 * grid.L) * np.linalg.norm(c))


def _q(u: Field, dealias: bool = True) -> np.ndarray:
    """Samples of |u|^2 - 1."""
    return dealiased_product(u.grid, u.values, u.values.conj(), dealias=dealias).real - 1.0


def _proj(grid: GridSpec, samples: np.ndarray) -> np.ndarray:
    return grid.to_samples(project_coeffs(grid, grid.to_coeffs(samples)))


def mass_defect(u: Field) -> float:
    """Torus L2 norm of |u|^2 - 1 (pointwise, no truncation)."""
    return l2_norm(np.abs(u.values) ** 2 - 1.0, u.grid)


def chirality_leak(u: Field, relative: bool = True) -> float:
    leak = negative_part_norm(u)
    if relative:
        total = l2_norm(u)
        return leak / total if total > 0 else 0.0
    return leak


def _first_field(u: Field, dealias: bool = True) -> np.ndarray:
    """Samples of D u + u Pi(|u|^2 - 1)."""
    g = u.grid
    Du = g.to_samples(g.xi * u.coeffs)
    return Du + dealiased_product(g, u.values, _proj(g, _q(u, dealias)), dealias=dealias)


def i1(u: Field, dealias: bool = True) -> float:
    return l2_norm(_first_field(u, dealias), u.grid)


def i2_terms(u: Field, dealias: bool = True) -> list[np.ndarray]:
    """The six summands of the second conserved functional, as samples."""
    g = u.grid
    dp = lambda *a: dealiased_product(g, *a, dealias=dealias)  # noqa: E731
    c = u.coeffs
    Du = g.to_samples(g.xi * c)
    D2u = g.to_samples(g.xi**2 * c)
    q = _q(u, dealias)
    Pq = _proj(g, q)
    uPq = dp(u.values, Pq)
    mod2 = q + 1.0
    return [
        D2u,
        dp(u.values, _proj(g, dp(u.values.conj(), Du))),
        g.to_samples(g.xi * g.to_coeffs(uPq)),
        Du,
        dp(u.values, _proj(g, dp(mod2, Pq))),
        uPq,
    ]


def i2(u: Field, dealias: bool = True) -> float:
    return l2_norm(sum(i2_terms(u, dealias)), u.grid)


@dataclass(frozen=True, eq=False)
class GaugeField(Field):
    """v = p(x) exp(i slope x) with p periodic; keeps the linear phase analytic."""

    periodic: Field | None = None
    slope: float = 0.0

    def derivative(self) -> np.ndarray:
        p = self.periodic
        return (derivative_x(p).values + 1j * self.slope * p.values) * np.exp(
            1j * self.slope * self.grid.x
        )


def gauge_transform(u: Field) -> GaugeField:
    """v = u exp((i/2) int_0^x (|u|^2 - 1) dy).

    The integral is the mean of |u|^2 - 1 times x plus the spectral antiderivative
    of the fluctuation, both anchored at x = 0.
    """
    g = u.grid
    q = np.abs(u.values) ** 2 - 1.0
    qc = g.to_coeffs(q)
    mean = qc[0].real
    k = g.xi
    anti = np.zeros_like(qc)
    nz = k != 0
    anti[nz] = qc[nz] / (1j * k[nz])
    F = g.to_samples(anti).real
    F0 = np.sum(anti).real  # value at x = 0
    periodic = Field(g, u.values * np.exp(0.5j * (F - F0)))
    slope = 0.5 * mean
    v = periodic.values * np.exp(1j * slope * g.x)
    return GaugeField(g, v, periodic=periodic, slope=slope)


def i1_gauge(v: Field) -> float:
    """|| v' - (1/2) v H(|v|^2 - 1) || with i H taken as 2 Pi - Id (zero mode included)."""
    g = v.grid
    dv = v.derivative() if isinstance(v, GaugeField) else derivative_x(v).values
    q = np.abs(v.values) ** 2 - 1.0
    iHq = 2.0 * _proj(g, q) - q
    Hq = -1j * iHq
    return l2_norm(dv - 0.5 * v.values * Hq, g)


def hilbert_pairing(q: Field) -> tuple[complex, complex]:
    """Both sides of <q', H q> = -<q, |D| q>."""
    g = q.grid
    lhs = inner(derivative_x(q), hilbert_transform(q))
    absD = Field.from_coeffs(g, np.abs(g.xi) * q.coeffs)
    return lhs, -inner(q, absD)


def lax_residual(traj: Trajectory, t: float, f: Field, dt_fd: float, dealias: bool = True) -> float:
    """|| (L(t+h) - L(t-h)) f / 2h - [B, L] f || at time t."""
    try:
        up, um, u = traj.at(t + dt_fd), traj.at(t - dt_fd), traj.at(t)
    except KeyError as e:
        raise ValueError(f"t +- dt_fd not available in trajectory: {e}") from None
    du = derivative_x(u)
    lhs = (lax_L_apply(up, f, dealias).coeffs - lax_L_apply(um, f, dealias).coeffs) / (2 * dt_fd)
    Lf = lax_L_apply(u, f, dealias)
    Bf = lax_B_apply(u, du, f, dealias)
    comm = lax_B_apply(u, du, Lf, dealias).coeffs - lax_L_apply(u, Bf, dealias).coeffs
    return _coeff_norm(u.grid, lhs - comm)


def sobolev_norm(f: Field, s: int = 2) -> float:
    g = f.grid
    return _coeff_norm(g, (1.0 + g.xi**2) ** (s / 2) * f.coeffs)


def x2_norm(u: Field) -> float:
    g = u.grid
    c = u.coeffs
    return (
        float(np.max(np.abs(u.values)))
        + _coeff_norm(g, g.xi * c)
        + _coeff_norm(g, g.xi**2 * c)
    )


def d_E(u: Field, v: Field) -> float:
    if u.grid != v.grid:
        raise ValueError("grid mismatch")
    g = u.grid
    dc = u.coeffs - v.coeffs
    return (
        float(np.max(np.abs(u.values - v.values)))
        + _coeff_norm(g, g.xi * dc)
        + _coeff_norm(g, g.xi**2 * dc)
        + l2_norm(np.abs(u.values) ** 2 - np.abs(v.values) ** 2, g)
    )


def check_sum_bound(v: Field, w: Field) -> tuple[float, float]:
    """Both sides of || |v+w|^2 - 1 || <= || |v|^2 - 1 || + 2 |v|_inf ||w|| + ||w||_4^2."""
    g = v.grid
    lhs = l2_norm(np.abs(v.values + w.values) ** 2 - 1.0, g)
    l4sq = float(np.sqrt(np.sum(np.abs(w.values) ** 4) * g.dx))
    rhs = mass_defect(v) + 2.0 * float(np.max(np.abs(v.values))) * l2_norm(w) + l4sq
    return lhs, rhs


def check_linear_group_bound(f: Field, t_list) -> tuple[np.ndarray, np.ndarray]:
    """Ratios ||exp(it d^2) f - f|| / (sqrt|t| ||f'||) and H^2 norms of the difference."""
    g = f.grid
    c = f.coeffs
    fp = _coeff_norm(g, g.xi * c)
    if fp == 0:
        raise ValueError("f' vanishes")
    ratios, h2 = [], []
    for t in t_list:
        dc = (np.exp(-1j * t * g.xi**2) - 1.0) * c
        ratios.append(0.0 if t == 0 else _coeff_norm(g, dc) / (np.sqrt(abs(t)) * fp))
        h2.append(_coeff_norm(g, (1.0 + g.xi**2) * dc))
    return np.array(ratios), np.array(h2)


@dataclass(frozen=True)
class InvariantReport:
    t: float
    i1: float
    i2: float
    mass_defect: float
    x2_norm: float
    leak: float
    lb_slack: float

    HEADER = "t,i1,i2,mass_defect,x2_norm,leak,lb_slack"

    def row(self) -> tuple:
        return astuple(self)


def invariant_report(u: Field, t: float, dealias: bool = True) -> InvariantReport:
    a = i1(u, dealias)
    m = mass_defect(u)
    rep = InvariantReport(
        t=float(t),
        i1=a,
        i2=i2(u, dealias),
        mass_defect=m,
        x2_norm=x2_norm(u),
        leak=chirality_leak(u),
        lb_slack=a * a - m * m / 6.0,
    )
    if not all(np.isfinite(getattr(rep, f.name)) for f in fields(rep)):
        raise FloatingPointError(f"non-finite invariant report at t = {t}")
    return rep
