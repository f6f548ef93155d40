"""
Steady-state and time-domain solutions of the master equation.

Three independent routes are provided:

* :func:`steady_state` -- sparse LU of the generator with one row replaced by
  the trace functional (the production path);
* :func:`steady_state_dense_oracle` -- null vector of the dense generator from
  an SVD, polished by inverse iteration (test oracle, small systems only);
* :func:`evolve` -- adaptive Runge-Kutta integration (physics cross-check).
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.integrate import DOP853

from .exceptions import (
    AmbiguousSteadyStateError,
    DegenerateSteadyStateError,
    InvalidParameterError,
    NoConvergenceError,
    NumericalFailureError,
    StiffnessError,
    UndefinedCorrelationError,
)
from .hilbert import HilbertSpace
from .liouvillian import Liouvillian, system_liouvillian, unvec, vec
from .model import SystemParams
from .observables import MEAN_PHOTON_FLOOR, g2_zero, mean_photon

log = logging.getLogger(__name__)

HERMITIAN_ATOL = 1e-10
TRACE_ATOL = 1e-10
MIN_EIGENVALUE = -1e-8
PRECORRECTION_ATOL = 1e-8
MAX_CONDITION = 1e12
DENSE_ORACLE_MAX_SUPERDIM = 10_000
MIN_STEP_FRACTION = 1e-12
STIFF_STEP_PATIENCE = 100


@dataclass(frozen=True, eq=False)
class SteadyStateResult:
    rho: np.ndarray
    residual: float
    top_fock_population: float
    method: str
    condition: Optional[float] = None

    @property
    def dim(self) -> int:
        return self.rho.shape[0]


def density_matrix_diagnostics(rho: np.ndarray) -> dict:
    rho = np.asarray(rho)
    return {
        "hermitian_deviation": float(np.max(np.abs(rho - rho.conj().T))),
        "trace_deviation": float(abs(np.trace(rho) - 1.0)),
        "min_eigenvalue": float(np.min(np.linalg.eigvalsh((rho + rho.conj().T) / 2))),
    }


def validate_density_matrix(rho: np.ndarray) -> dict:
    """Raise :class:`NumericalFailureError` unless ``rho`` is a valid state."""
    diag = density_matrix_diagnostics(rho)
    if (
        diag["hermitian_deviation"] > HERMITIAN_ATOL
        or diag["trace_deviation"] > TRACE_ATOL
        or diag["min_eigenvalue"] < MIN_EIGENVALUE
    ):
        raise NumericalFailureError("density-matrix invariants violated", diag)
    return diag


def _finalize(x: np.ndarray, dim: int, method: str) -> np.ndarray:
    rho = unvec(x, dim)
    pre = {
        "hermitian_deviation": float(np.max(np.abs(rho - rho.conj().T))),
        "trace_deviation": float(abs(np.trace(rho) - 1.0)),
    }
    if max(pre.values()) > PRECORRECTION_ATOL:
        raise NumericalFailureError(f"{method}: raw solution deviates before correction", pre)
    rho = (rho + rho.conj().T) / 2
    rho = rho / np.trace(rho).real
    validate_density_matrix(rho)
    return rho


def _top_population(rho: np.ndarray) -> float:
    """Population of the highest Fock level; ``nan`` for non-model dimensions."""
    if rho.shape[0] % 4 or rho.shape[0] < 8:
        return float("nan")
    hs = HilbertSpace(rho.shape[0] // 4 - 1)
    p = np.real(np.diag(rho))
    return float(p[hs.photon_numbers == hs.n_max].sum())


def _trace_row_system(L: Liouvillian):
    d = L.dim
    n = L.superdim
    gen = L.generator.tocsr()
    keep = np.ones(n)
    keep[0] = 0.0
    trace_idx = np.arange(d) * (d + 1)
    row = sp.csr_matrix((np.ones(d, dtype=complex), (np.zeros(d, dtype=int), trace_idx)), shape=(n, n))
    A = (sp.diags(keep) @ gen + row).tocsc()
    b = np.zeros(n, dtype=complex)
    b[0] = 1.0
    return A, b


def _condition_estimate(A: sp.csc_matrix, lu) -> float:
    n = A.shape[0]
    inv = spla.LinearOperator(
        (n, n),
        matvec=lambda x: lu.solve(np.asarray(x, dtype=complex).ravel()),
        rmatvec=lambda x: lu.solve(np.asarray(x, dtype=complex).ravel(), trans="H"),
        dtype=complex,
    )
    norm_a = float(abs(A).sum(axis=0).max())
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        return norm_a * float(spla.onenormest(inv))


def steady_state(L: Liouvillian, tol: float = 1e-10, check_condition: bool = True) -> SteadyStateResult:
    """Stationary state from a direct sparse solve.

    The first equation of ``L vec(rho) = 0`` is replaced by ``Tr(rho) = 1``.
    """
    if tol <= 0:
        raise InvalidParameterError("tol must be positive")
    A, b = _trace_row_system(L)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("error", spla.MatrixRankWarning)
            lu = spla.splu(A)
    except (RuntimeError, spla.MatrixRankWarning) as exc:
        raise DegenerateSteadyStateError(f"trace-constrained generator is singular: {exc}") from exc
    cond = None
    if check_condition:
        cond = _condition_estimate(A, lu)
        if not np.isfinite(cond) or cond > MAX_CONDITION:
            raise DegenerateSteadyStateError(f"condition estimate {cond:.3g} exceeds {MAX_CONDITION:.0e}")
    x = lu.solve(b)
    if not np.all(np.isfinite(x)):
        raise DegenerateSteadyStateError("non-finite steady-state solution")
    rho = _finalize(x, L.dim, "sparse-direct")
    residual = float(np.linalg.norm(L.generator @ vec(rho)))
    if residual >= tol:
        raise NumericalFailureError(
            f"residual {residual:.3g} exceeds tolerance {tol:.3g}", {"residual": residual}
        )
    return SteadyStateResult(rho, residual, _top_population(rho), "sparse-direct", cond)


def steady_state_dense_oracle(L: Liouvillian, kernel_rtol: float = 1e-9) -> SteadyStateResult:
    """Ground-truth stationary state from the dense null space.

    The smallest right-singular vector is refined by two inverse-iteration
    steps so that tiny multi-photon populations are resolved to the same
    relative accuracy as the sparse route.
    """
    if L.superdim > DENSE_ORACLE_MAX_SUPERDIM:
        raise InvalidParameterError(
            f"dense oracle limited to dim^2 <= {DENSE_ORACLE_MAX_SUPERDIM}, got {L.superdim}"
        )
    M = L.dense()
    _, s, vh = sla.svd(M)
    null = int(np.sum(s <= kernel_rtol * s[0]))
    if null != 1:
        raise AmbiguousSteadyStateError(f"generator kernel has dimension {null}, expected 1")
    v = vh[-1].conj()
    shift = 1e-14 * s[0]
    lu = sla.lu_factor(M + shift * np.eye(M.shape[0]))
    for _ in range(2):
        v = sla.lu_solve(lu, v)
        v /= np.linalg.norm(v)
    tr = np.trace(unvec(v, L.dim))
    rho = _finalize(v / tr, L.dim, "dense-null-space")
    residual = float(np.linalg.norm(M @ vec(rho)))
    return SteadyStateResult(rho, residual, _top_population(rho), "dense-null-space", float(s[0] / s[-2]))


def _checked_rhs(gen, y):
    dy = gen @ y
    if not np.all(np.isfinite(dy)):
        raise StiffnessError("non-finite derivative during integration; use steady_state instead")
    return dy


def evolve(
    L: Liouvillian,
    rho0: np.ndarray,
    t_final: float,
    rtol: float = 1e-10,
    atol: float = 1e-24,
) -> np.ndarray:
    """Integrate ``d rho/dt = L rho`` from ``rho0`` up to ``t_final``.

    Uses the embedded 8(5,3) Dormand-Prince pair.  ``atol`` defaults very
    small so that multi-photon populations many orders below unity are still
    controlled in relative terms.
    """
    if t_final < 0:
        raise InvalidParameterError("t_final must be non-negative")
    rho0 = np.asarray(rho0, dtype=complex)
    if t_final == 0:
        return rho0.copy()
    gen = L.generator.tocsr()
    y0 = vec(rho0).copy()
    tr0 = np.trace(rho0)
    min_step = MIN_STEP_FRACTION * t_final
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        stepper = DOP853(lambda t, y: _checked_rhs(gen, y), 0.0, y0, t_final, rtol=rtol, atol=atol)
        small = 0
        while stepper.status == "running":
            message = stepper.step()
            if message is not None or not np.all(np.isfinite(stepper.y)):
                raise StiffnessError(f"time integration failed ({message}); use steady_state instead")
            # the first steps are tiny while the controller ramps up from its initial guess
            small = small + 1 if stepper.step_size < min_step else 0
            if stepper.status == "running" and small > STIFF_STEP_PATIENCE:
                raise StiffnessError(
                    f"step size {stepper.step_size:.3g} below {min_step:.3g}; use steady_state instead"
                )
    rho = unvec(stepper.y, L.dim)
    drift = abs(np.trace(rho) - tr0)
    if drift > 1e-8:
        raise NumericalFailureError(f"trace drift {drift:.3g} during integration", {"trace_drift": drift})
    return (rho + rho.conj().T) / 2


def ground_state(hs: HilbertSpace) -> np.ndarray:
    rho = np.zeros((hs.dim, hs.dim), dtype=complex)
    rho[0, 0] = 1.0
    return rho


def solve(params: SystemParams, n_max: int, tol: float = 1e-10, check_condition: bool = True) -> SteadyStateResult:
    """Steady state of the standard model at a fixed cutoff."""
    hs = HilbertSpace(n_max)
    return steady_state(system_liouvillian(params, hs), tol=tol, check_condition=check_condition)


def _observables(res: SteadyStateResult):
    hs = HilbertSpace(res.dim // 4 - 1)
    n = mean_photon(res.rho, hs)
    try:
        g2 = g2_zero(res.rho, hs)
    except UndefinedCorrelationError:
        g2 = None
    return g2, n


def _rel_change(new, old) -> float:
    if new is None or old is None:
        return 0.0 if new is old else np.inf
    scale = max(abs(old), 1e-300)
    return abs(new - old) / scale


def auto_truncate(
    params: SystemParams,
    tol: float = 1e-8,
    ceiling: int = 30,
    start: int = 3,
    solver_tol: float = 1e-10,
) -> int:
    """Smallest cutoff ``>= start`` at which adding two photon levels changes
    neither ``g2(0)`` nor the mean photon number by more than ``tol`` (relative)
    and the top Fock level holds less than ``tol`` of the population."""
    if tol <= 0:
        raise InvalidParameterError("tol must be positive")
    n = start
    current = solve(params, n, tol=solver_tol)
    while n + 2 <= ceiling:
        nxt = solve(params, n + 2, tol=solver_tol)
        (g_a, n_a), (g_b, n_b) = _observables(current), _observables(nxt)
        converged = (
            _rel_change(g_b, g_a) < tol
            and _rel_change(n_b, n_a) < tol
            and current.top_fock_population < tol
        )
        if max(n_a, n_b) <= MEAN_PHOTON_FLOOR and current.top_fock_population < tol:
            converged = True
        log.debug("auto_truncate n_max=%d g2=%s mean=%s converged=%s", n, g_a, n_a, converged)
        if converged:
            return n
        n, current = n + 2, nxt
    raise NoConvergenceError(
        f"photon cutoff did not converge below ceiling {ceiling}; drive may be outside the weak-drive regime"
    )
