"""Time stepping for  u_t = i u_xx - 4 u Pi(Re(conj(u) u_x)).

The dispersive part is integrated exactly through the integrating factor
exp(-i t xi^2); the nonlinear part by classical RK4 on the transformed variable
(Lawson scheme).  All arithmetic is done on full coefficient vectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import Field, GridSpec, SPECTRAL_TOL, negative_part_norm


class InstabilityError(RuntimeError):
    """Non-finite values appeared; carries the last finite state."""

    def __init__(self, msg: str, last_state: Field, t: float):
        super().__init__(msg)
        self.last_state = last_state
        self.t = t


class ChiralityLeakError(RuntimeError):
    def __init__(self, msg: str, state: Field, t: float, leak: float):
        super().__init__(msg)
        self.state = state
        self.t = t
        self.leak = leak


@dataclass(frozen=True)
class SolverConfig:
    dt: float = 1e-3
    t_final: float = 1.0
    snapshot_stride: int = 100
    dealias: bool = True
    scheme: str = "if-rk4"
    leak_tol: float = 1e-8

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.t_final < 0:
            raise ValueError("t_final must be nonnegative")
        if int(self.snapshot_stride) != self.snapshot_stride or self.snapshot_stride < 1:
            raise ValueError("snapshot_stride must be a positive integer")
        if self.scheme != "if-rk4":
            raise ValueError(f"unknown scheme {self.scheme!r}")


@dataclass
class Trajectory:
    grid: GridSpec
    times: list[float] = field(default_factory=list)
    snapshots: list[Field] = field(default_factory=list)
    step_times: list[float] = field(default_factory=list)
    rhs_norm: list[float] = field(default_factory=list)
    leak: list[float] = field(default_factory=list)
    chiral: bool = False

    def append(self, t: float, u: Field):
        if self.times and t <= self.times[-1]:
            raise ValueError("snapshot times must increase")
        if u.grid != self.grid:
            raise ValueError("grid mismatch")
        self.times.append(float(t))
        self.snapshots.append(u)

    def __len__(self):
        return len(self.times)

    @property
    def final(self) -> Field:
        return self.snapshots[-1]

    def index(self, t: float, tol: float = 1e-9) -> int:
        ts = np.asarray(self.times)
        i = int(np.argmin(np.abs(ts - t)))
        if abs(ts[i] - t) > tol * max(1.0, abs(t)):
            raise KeyError(f"no snapshot at t = {t}")
        return i

    def at(self, t: float) -> Field:
        return self.snapshots[self.index(t)]


def nonlinear_coeffs(grid: GridSpec, c: np.ndarray, dealias: bool = True) -> np.ndarray:
    """Coefficients of -4 u Pi(Re(conj(u) u_x)) from those of u."""
    mask = grid.dealias_mask if dealias else np.ones(grid.N, dtype=bool)
    cm = c * mask
    u = grid.to_samples(cm)
    ux = grid.to_samples(1j * grid.xi * cm)
    p = grid.to_coeffs(np.real(u.conj() * ux)) * (mask & grid.positive)
    prod = u * grid.to_samples(p)
    out = grid.to_coeffs(prod)
    if dealias:
        out = out * mask
    return -4.0 * out


def rhs(u: Field, dealias: bool = True) -> Field:
    g = u.grid
    return Field.from_coeffs(g, -1j * g.xi**2 * u.coeffs + nonlinear_coeffs(g, u.coeffs, dealias))


def _step_coeffs(grid: GridSpec, c: np.ndarray, dt: float, dealias: bool, k1=None):
    lam = -1j * grid.xi**2
    E = np.exp(lam * dt)
    E2 = np.exp(lam * dt / 2)
    N = nonlinear_coeffs
    if k1 is None:
        k1 = N(grid, c, dealias)
    k2 = N(grid, E2 * (c + 0.5 * dt * k1), dealias)
    k3 = N(grid, E2 * c + 0.5 * dt * k2, dealias)
    k4 = N(grid, E * c + dt * E2 * k3, dealias)
    return E * c + (dt / 6.0) * (E * k1 + 2.0 * E2 * (k2 + k3) + k4)


def step(u: Field, dt: float, dealias: bool = True) -> Field:
    """One integrating-factor RK4 step."""
    if dt == 0:
        return u
    c = _step_coeffs(u.grid, u.coeffs, dt, dealias)
    if not np.all(np.isfinite(c)):
        raise InstabilityError("blow-up or instability in step", u, 0.0)
    return Field.from_coeffs(u.grid, c)


def _rel_leak(grid: GridSpec, c: np.ndarray) -> float:
    total = np.linalg.norm(c)
    if total == 0:
        return 0.0
    return float(np.linalg.norm(c[~grid.positive]) / total)


def is_chiral(u: Field, tol: float = SPECTRAL_TOL) -> bool:
    c = u.coeffs
    scale = max(1.0, float(np.max(np.abs(c))))
    return bool(np.max(np.abs(c[~u.grid.positive])) <= tol * scale)


def evolve(u0: Field, cfg: SolverConfig) -> Trajectory:
    """Integrate from t = 0 to cfg.t_final.

    Snapshots are taken every ``snapshot_stride`` steps and at the final time.  For
    chiral data the relative negative-frequency content is checked every step and
    the run aborts with ChiralityLeakError above ``cfg.leak_tol``.
    """
    g = u0.grid
    traj = Trajectory(g, chiral=is_chiral(u0))
    traj.append(0.0, u0)
    if cfg.t_final == 0:
        return traj
    n = max(1, int(np.ceil(cfg.t_final / cfg.dt - 1e-9)))
    dt = cfg.t_final / n
    lam = -1j * g.xi**2
    scale = np.sqrt(2.0 * g.L)
    c = np.array(u0.coeffs)
    for i in range(1, n + 1):
        k1 = nonlinear_coeffs(g, c, cfg.dealias)
        traj.step_times.append((i - 1) * dt)
        traj.rhs_norm.append(float(scale * np.linalg.norm(lam * c + k1)))
        traj.leak.append(_rel_leak(g, c))
        c_new = _step_coeffs(g, c, dt, cfg.dealias, k1=k1)
        t = i * dt
        if not np.all(np.isfinite(c_new)):
            raise InstabilityError(
                f"blow-up or instability at t = {t:.6g}", Field.from_coeffs(g, c), (i - 1) * dt
            )
        c = c_new
        if traj.chiral:
            leak = _rel_leak(g, c)
            if leak > cfg.leak_tol:
                state = Field.from_coeffs(g, c)
                raise ChiralityLeakError(
                    f"chirality leak {leak:.3e} exceeds {cfg.leak_tol:.1e} at t = {t:.6g}",
                    state,
                    t,
                    leak,
                )
        if i % cfg.snapshot_stride == 0 or i == n:
            traj.append(t, Field.from_coeffs(g, c))
    return traj


def leak_norm(u: Field) -> float:
    """Absolute L2 norm of the negative-frequency part."""
    return negative_part_norm(u)


def states_at(u0: Field, times, cfg: SolverConfig) -> dict[float, Field]:
    """Solution at each requested time, evolving segment by segment from t = 0."""
    out = {}
    t_prev, u = 0.0, u0
    for t in sorted(set(float(t) for t in times)):
        if t < 0:
            raise ValueError("times must be nonnegative")
        if t > t_prev:
            seg = SolverConfig(
                dt=cfg.dt, t_final=t - t_prev, snapshot_stride=10**9,
                dealias=cfg.dealias, leak_tol=cfg.leak_tol,
            )
            u = evolve(u, seg).final
            t_prev = t
        out[t] = u
    return out
