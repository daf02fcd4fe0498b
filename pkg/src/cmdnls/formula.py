"""Direct evaluation of the explicit solution formula at points of the upper half-plane.

Two independent discretizations are provided.

resolvent route
    u(t, z) = w(z) - 2t h(z), with w = exp(i s d^2) u0 and h solving
    (Id + 2t K R_z) h = K g, K = exp(i s d^2) T_u0 T_conj(u0) exp(-i s d^2),
    g = R_z w and R_z the difference-quotient resolvent.

trace route
    u(t, z) = w(z) - (t / i pi) I_+[(G_h + 2 s D + 2t T_u0 T_conj(u0) - z)^{-1} b],
    b = T_u0 T_conj(u0) exp(-i s d^2) g, G_h the forward-difference matrix and
    I_+ read off as 2L y_0.

Here s is the dispersion time: s = t for the equation itself, s = eps t for the
eps-dispersion family and s = 0 for its zero-dispersion limit.
"""

from __future__ import annotations

import hashlib
import threading
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
from scipy.sparse.linalg import LinearOperator, gmres

from .grid import Field, GridSpec, HardyField, check_upper, poisson_eval, project_coeffs
from .operators import (
    g_matrix,
    hardy_columns_apply,
    schrodinger_propagate,
    toeplitz_pair_coeffs,
    toeplitz_pair_matrix,
)

DENSE_MAX_K = 512
IPLUS_MAX_K = 4096
COND_LIMIT = 1e12
CHIRAL_TOL = 1e-10


class NearSingularError(RuntimeError):
    """The formula operator is numerically singular or the solve did not converge."""


@dataclass
class EvalResult:
    value: complex
    iterations: int
    residual: float
    h_at_z: complex = 0.0


@dataclass
class _Prepared:
    u0: Field
    pair: np.ndarray | None = None  # dense T_u0 T_conj(u0) on Hardy coefficients


@dataclass
class FormulaWorkspace:
    """Solver settings plus caches keyed on the datum and evaluation point."""

    grid: GridSpec
    mode: str = "auto"
    tol: float = 1e-10
    maxiter: int = 200
    restart: int = 60
    dealias: bool = True
    _prepared: dict = field(default_factory=dict, repr=False)
    _rz: dict = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def __post_init__(self):
        if self.mode not in ("auto", "dense", "gmres"):
            raise ValueError(f"unknown solve mode {self.mode!r}")
        if not 0 < self.tol < 1e-8:
            raise ValueError("solver tolerance must lie in (0, 1e-8)")

    @property
    def dense(self) -> bool:
        return self.mode == "dense" or (self.mode == "auto" and self.grid.K <= DENSE_MAX_K)

    def prepared(self, u0: Field) -> _Prepared:
        key = hashlib.sha1(u0.values.tobytes()).hexdigest()
        with self._lock:
            p = self._prepared.get(key)
            if p is None:
                p = self._prepared[key] = _Prepared(u0)
        return p

    def pair_matrix(self, u0: Field) -> np.ndarray:
        p = self.prepared(u0)
        if p.pair is None:
            m = toeplitz_pair_matrix(u0, self.dealias).matrix
            with self._lock:
                p.pair = m
        return p.pair

    def resolvent_matrix(self, z: complex) -> np.ndarray:
        with self._lock:
            m = self._rz.get(z)
        if m is None:
            g = self.grid
            m = hardy_columns_apply(g, lambda C: _resolvent_coeffs(g, C, z))
            with self._lock:
                self._rz[z] = m
        return m


def _check_inputs(u0: Field, ws: FormulaWorkspace):
    if u0.grid != ws.grid:
        raise ValueError("datum and workspace grids differ")
    c = u0.coeffs
    scale = max(1.0, float(np.max(np.abs(c))))
    if np.max(np.abs(c[~u0.grid.positive])) > CHIRAL_TOL * scale:
        raise ValueError("the formula needs chiral data (no negative frequencies)")


def _resolvent_coeffs(grid: GridSpec, C: np.ndarray, z: complex) -> np.ndarray:
    """Rows of C (full coefficient vectors of Hardy fields) mapped through R_z."""
    K = grid.K
    fz = C[:, :K] @ np.exp(1j * z * grid.hardy_xi)
    samples = grid.to_samples(C)
    q = (samples - fz[:, None]) / (grid.x - z)
    return project_coeffs(grid, grid.to_coeffs(q))


def difference_quotient(w: Field, z: complex) -> HardyField:
    """Projected (w(x) - w(z)) / (x - z); the background mode is split off first."""
    z = check_upper(z)
    g = w.grid
    c = np.array(w.coeffs)
    c[0] = 0.0
    fluct = Field.from_coeffs(g, c)
    fz = poisson_eval(fluct, z)
    q = Field(g, (fluct.values - fz) / (g.x - z))
    return HardyField.from_coeffs(g, project_coeffs(g, q.coeffs))


def _phase(grid: GridSpec, s: float) -> np.ndarray:
    return np.exp(-1j * s * grid.hardy_xi**2)


def _solve_resolvent(u0: Field, t: float, s: float, z: complex, ws: FormulaWorkspace) -> EvalResult:
    g = ws.grid
    z = check_upper(z)
    w = schrodinger_propagate(u0, s)
    wz = poisson_eval(w, z)
    K = g.K
    gq = difference_quotient(w, z)
    ph = _phase(g, s)
    ez = np.exp(1j * z * g.hardy_xi)

    def pair_apply(x):
        full = g.hardy_to_full(x)
        return toeplitz_pair_coeffs(u0, full[None, :], ws.dealias)[0, :K]

    def kop(x):
        return ph * pair_apply(x / ph)

    rhs = kop(gq.hardy_coeffs)
    if not np.any(rhs):
        return EvalResult(wz, 0, 0.0, 0.0)

    if ws.dense:
        pair = ws.pair_matrix(u0)
        Kmat = (ph[:, None] * pair) / ph[None, :]
        A = np.eye(K, dtype=complex) + 2.0 * t * (Kmat @ ws.resolvent_matrix(z))
        h = _dense_solve(A, rhs)
        iters = 1
    else:
        def matvec(x):
            full = g.hardy_to_full(x)
            r = _resolvent_coeffs(g, full[None, :], z)[0, :K]
            return x + 2.0 * t * kop(r)

        A = LinearOperator((K, K), matvec=matvec, dtype=complex)
        count = [0]

        def cb(_):
            count[0] += 1

        h, info = gmres(
            A, rhs, rtol=ws.tol, atol=0.0, restart=ws.restart, maxiter=ws.maxiter,
            callback=cb, callback_type="pr_norm",
        )
        if info != 0:
            raise NearSingularError(
                f"near-singular formula operator: GMRES did not converge (info={info})"
            )
        iters = count[0]
    Ah = A @ h if ws.dense else A.matvec(h)
    residual = float(np.linalg.norm(Ah - rhs) / np.linalg.norm(rhs))
    hz = complex(h @ ez)
    return EvalResult(wz - 2.0 * t * hz, iters, residual, hz)


def _dense_solve(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    lu, piv = sla.lu_factor(A, check_finite=True)
    anorm = np.linalg.norm(A, 1)
    rcond, info = sla.lapack.zgecon(lu, anorm, norm="1")
    if info != 0 or rcond * COND_LIMIT < 1.0:
        raise NearSingularError(
            f"near-singular formula operator (condition estimate {1 / max(rcond, 1e-300):.3e})"
        )
    return sla.lu_solve((lu, piv), b)


def _solve_trace(u0: Field, t: float, s: float, z: complex, ws: FormulaWorkspace) -> EvalResult:
    g = ws.grid
    z = check_upper(z)
    K = g.K
    if K > IPLUS_MAX_K:
        raise ValueError(f"trace route limited to K <= {IPLUS_MAX_K} (got {K})")
    w = schrodinger_propagate(u0, s)
    wz = poisson_eval(w, z)
    gq = difference_quotient(w, z)
    pair = ws.pair_matrix(u0)
    b = pair @ (gq.hardy_coeffs * np.conj(_phase(g, s)))
    A = g_matrix(g).matrix + 2.0 * s * np.diag(g.hardy_xi) + 2.0 * t * pair
    A[np.diag_indices(K)] -= z
    y = _dense_solve(A, b)
    residual = float(np.linalg.norm(A @ y - b) / max(np.linalg.norm(b), 1e-300))
    trace = 2.0 * g.L * y[0]
    return EvalResult(wz - (t / (1j * np.pi)) * trace, 1, residual, trace)


def _route(route: str):
    if route == "resolvent":
        return _solve_resolvent
    if route in ("iplus", "trace"):
        return _solve_trace
    raise ValueError(f"unknown route {route!r}")


def explicit_eval(u0: Field, t: float, z: complex, ws: FormulaWorkspace, full_output: bool = False):
    """u(t, z) by the resolvent route."""
    _check_inputs(u0, ws)
    r = _solve_resolvent(u0, t, t, z, ws)
    return r if full_output else r.value


def explicit_eval_iplus(
    u0: Field, t: float, z: complex, ws: FormulaWorkspace, full_output: bool = False
):
    """u(t, z) by the trace route with the forward-difference G."""
    _check_inputs(u0, ws)
    r = _solve_trace(u0, t, t, z, ws)
    return r if full_output else r.value


def v_eval(u0: Field, t: float, z: complex, ws: FormulaWorkspace, full_output: bool = False):
    """u(t, z) - (exp(i t d^2) u0)(z); also computed directly as -2t h(z)."""
    _check_inputs(u0, ws)
    r = _solve_resolvent(u0, t, t, z, ws)
    wz = poisson_eval(schrodinger_propagate(u0, t), z)
    v = r.value - wz
    direct = -2.0 * t * r.h_at_z
    return (v, direct) if full_output else v


def zd_eps_eval(
    u0: Field, t: float, z: complex, eps: float, ws: FormulaWorkspace,
    route: str = "resolvent", full_output: bool = False,
):
    """Solution of i u_t + eps u_xx = 2 Pi D(|u|^2) u at (t, z)."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    _check_inputs(u0, ws)
    r = _route(route)(u0, t, eps * t, z, ws)
    return r if full_output else r.value


def zd_limit_eval(
    u0: Field, t: float, z: complex, ws: FormulaWorkspace,
    route: str = "resolvent", full_output: bool = False,
):
    """Pointwise zero-dispersion limit: the eps-formula with all propagators removed."""
    _check_inputs(u0, ws)
    r = _route(route)(u0, t, 0.0, z, ws)
    return r if full_output else r.value
