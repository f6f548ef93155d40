"""
Weak-drive amplitude equations in the symmetric collective basis.

To second order in the drive the state is

    |psi> = |gg,0> + c(gg,1)|gg,1> + c(+,0)|+,0>
                   + c(gg,2)|gg,2> + c(+,1)|+,1> + c(ee,0)|ee,0>

with ``|+,n> = (|eg,n> + |ge,n>)/sqrt(2)``.  Losses enter through the
non-Hermitian terms ``-i kappa`` per photon, ``-i (gamma + gamma')`` per
symmetric qubit excitation and ``-2 i gamma`` on ``|ee,0>``.  Two-photon
emission vanishes where ``c(gg,2) = 0``; in the lossless limit this happens
exactly at ``delta_c = -2 delta_a`` for every coupling ``g``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterable, List, Optional

import numpy as np
from scipy.optimize import minimize_scalar

from .exceptions import InvalidParameterError, NumericalFailureError, ScanWindowError
from .model import SystemParams, qdi_condition

COLLECTIVE_BASIS = ("gg,0", "gg,1", "+,0", "gg,2", "+,1", "ee,0")
PHOTONS = np.array([0, 1, 0, 2, 1, 0])
FIRST_ORDER = [1, 2]
SECOND_ORDER = [3, 4, 5]
WEAK_DRIVE_LIMIT = 0.2


class NearSingularWarning(RuntimeWarning):
    pass


def effective_hamiltonian(params: SystemParams) -> np.ndarray:
    """Non-Hermitian Hamiltonian on :data:`COLLECTIVE_BASIS` (6x6, complex)."""
    s = params.detuning_sign
    da, dc = -s * params.delta_a, -s * params.delta_c
    J = params.j_ddi
    k = params.kappa
    gp = params.gamma + params.gamma_collective
    r2 = math.sqrt(2.0)
    g, om = params.g, params.omega_p

    h = np.zeros((6, 6), dtype=complex)
    h[1, 1] = dc - 1j * k
    h[2, 2] = da + J - 1j * gp
    h[3, 3] = 2 * dc - 2j * k
    h[4, 4] = da + dc + J - 1j * (k + gp)
    h[5, 5] = 2 * da - 2j * params.gamma

    couplings = [
        (1, 2, r2 * g),   # |gg,1> <-> |+,0>
        (3, 4, 2 * g),    # |gg,2> <-> |+,1>
        (4, 5, r2 * g),   # |+,1>  <-> |ee,0>
        (0, 2, r2 * om),  # |gg,0> <-> |+,0>
        (1, 4, r2 * om),  # |gg,1> <-> |+,1>
        (2, 5, r2 * om),  # |+,0>  <-> |ee,0>
    ]
    for i, j, v in couplings:
        h[i, j] = h[j, i] = v
    return h


@dataclass(frozen=True)
class AmplitudeSolution:
    """Steady amplitudes relative to ``c(gg,0) = 1``."""

    gg1: complex
    plus0: complex
    gg2: complex
    plus1: complex
    ee0: complex

    @property
    def mean_photon(self) -> float:
        return abs(self.gg1) ** 2 + abs(self.plus1) ** 2

    @property
    def g2_proxy(self) -> float:
        """Leading-order ``g2(0)`` estimate ``2|c(gg,2)|^2 / <n>^2``."""
        n = self.mean_photon
        if n == 0:
            return math.nan
        return 2 * abs(self.gg2) ** 2 / n**2


def _solve_block(block: np.ndarray, rhs: np.ndarray, label: str) -> np.ndarray:
    cond = np.linalg.cond(block)
    if not np.isfinite(cond) or cond > 1e12:
        warnings.warn(
            f"{label} amplitude block nearly singular (condition {cond:.3g})",
            NearSingularWarning,
            stacklevel=3,
        )
    try:
        return np.linalg.solve(block, rhs)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailureError(f"{label} amplitude block is singular", {"condition": cond}) from exc


def perturbative_amplitudes(params: SystemParams) -> AmplitudeSolution:
    """Solve the steady amplitude equations order by order in the drive."""
    if params.omega_p >= WEAK_DRIVE_LIMIT:
        warnings.warn(
            f"omega_p={params.omega_p} is outside the weak-drive window (< {WEAK_DRIVE_LIMIT})",
            stacklevel=2,
        )
    h = effective_hamiltonian(params)
    h1 = h[np.ix_(FIRST_ORDER, FIRST_ORDER)]
    c1 = _solve_block(h1, -h[FIRST_ORDER, 0], "first-order")
    h2 = h[np.ix_(SECOND_ORDER, SECOND_ORDER)]
    c2 = _solve_block(h2, -h[np.ix_(SECOND_ORDER, FIRST_ORDER)] @ c1, "second-order")
    return AmplitudeSolution(*c1, *c2)


def two_photon_weight(params: SystemParams) -> float:
    return abs(perturbative_amplitudes(params).gg2) ** 2


def _default_window(delta_a: float):
    centre = qdi_condition(delta_a)
    half = max(5.0, abs(delta_a))
    return centre - half, centre + half


def qdi_minimizer(params: SystemParams, window: Optional[tuple] = None, points: int = 2001) -> float:
    """Cavity detuning minimising ``|c(gg,2)|^2`` at fixed qubit detuning."""
    lo, hi = window if window is not None else _default_window(params.delta_a)
    grid = np.linspace(lo, hi, points)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NearSingularWarning)
        weights = np.array([two_photon_weight(params.replace(delta_c=x)) for x in grid])
    i = int(np.argmin(weights))
    if i == 0 or i == points - 1:
        raise ScanWindowError(f"no interior minimum of |c(gg,2)|^2 in [{lo}, {hi}]")
    res = minimize_scalar(
        lambda x: math.log(two_photon_weight(params.replace(delta_c=x)) + 1e-300),
        bounds=(grid[i - 1], grid[i + 1]),
        method="bounded",
        options={"xatol": 1e-10 * max(1.0, abs(grid[i]))},
    )
    return float(res.x)


def qdi_root_scan(
    params_template: SystemParams,
    g_values: Iterable[float],
    window: Optional[tuple] = None,
    points: int = 2001,
) -> List[float]:
    """Two-photon-suppressing ``delta_c`` for each coupling in ``g_values``."""
    g_values = list(g_values)
    if not g_values:
        raise InvalidParameterError("g_values must not be empty")
    return [qdi_minimizer(params_template.replace(g=g), window, points) for g in g_values]


def linewidth_offset(params: SystemParams, **kwargs) -> float:
    """Shift of the numerical minimiser away from the lossless ``-2 delta_a``."""
    return qdi_minimizer(params, **kwargs) - qdi_condition(params.delta_a)
