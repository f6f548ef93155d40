"""
Cavity-field observables and dressed-state manifold spectra.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.special import gammaln

from .exceptions import InvalidParameterError, UndefinedCorrelationError
from .hilbert import HilbertSpace, annihilation, expectation
from .model import SystemParams, hamiltonian

MEAN_PHOTON_FLOOR = 1e-14
IMAG_ATOL = 1e-10
POISSON_FLOOR = 1e-30


def _real(value: complex, what: str) -> float:
    if abs(value.imag) > IMAG_ATOL:
        raise InvalidParameterError(f"{what} has imaginary part {value.imag:.3g}; state is not Hermitian")
    return float(value.real)


@lru_cache(maxsize=64)
def _moment_operators(hs: HilbertSpace):
    a = annihilation(hs)
    ad = a.dag()
    return ad @ a, ad @ ad @ a @ a


def mean_photon(rho: np.ndarray, hs: HilbertSpace) -> float:
    return _real(expectation(_moment_operators(hs)[0], rho), "<a+ a>")


def g2_zero(rho: np.ndarray, hs: HilbertSpace, floor: float = MEAN_PHOTON_FLOOR) -> float:
    """Equal-time second-order correlation ``<a+ a+ a a> / <a+ a>**2``."""
    n = mean_photon(rho, hs)
    if n <= floor:
        raise UndefinedCorrelationError(f"mean photon number {n:.3g} is below floor {floor:.1e}")
    nn = _real(expectation(_moment_operators(hs)[1], rho), "<a+ a+ a a>")
    return nn / n**2


def photon_distribution(rho: np.ndarray, hs: HilbertSpace) -> np.ndarray:
    """Cavity photon-number distribution with both qubits traced out."""
    p = np.real(np.diag(rho)).reshape(4, hs.n_levels)
    return p.sum(axis=0)


def poisson(mean: float, n_max: int) -> np.ndarray:
    n = np.arange(n_max + 1)
    if mean == 0:
        return (n == 0).astype(float)
    return np.exp(-mean + n * math.log(mean) - gammaln(n + 1))


@dataclass(frozen=True, eq=False)
class PhotonStatistics:
    """Photon-number statistics of a cavity state.

    ``poisson_deviation[n]`` is ``(P(n) - Poisson(n)) / Poisson(n)`` and
    ``nan`` where the Poisson reference is below ``POISSON_FLOOR`` or the
    mean photon number is below the correlation floor.
    """

    mean_n: float
    g2_zero: Optional[float]
    p_n: np.ndarray
    poisson_deviation: np.ndarray

    def deviation(self, n: int) -> Optional[float]:
        value = self.poisson_deviation[n]
        return None if np.isnan(value) else float(value)


def photon_statistics(rho: np.ndarray, hs: HilbertSpace, floor: float = MEAN_PHOTON_FLOOR) -> PhotonStatistics:
    p = photon_distribution(rho, hs)
    mean = mean_photon(rho, hs)
    dev = np.full(hs.n_levels, np.nan)
    g2 = None
    if mean > floor:
        g2 = g2_zero(rho, hs, floor)
        ref = poisson(mean, hs.n_max)
        ok = ref > POISSON_FLOOR
        dev[ok] = (p[ok] - ref[ok]) / ref[ok]
    return PhotonStatistics(mean, g2, p, dev)


def coherent_state(hs: HilbertSpace, alpha: complex, normalize: bool = True) -> np.ndarray:
    """Density matrix of ``|gg> x |alpha>`` truncated at the cutoff."""
    n = np.arange(hs.n_levels)
    amps = complex(alpha) ** n * np.exp(-abs(alpha) ** 2 / 2 - 0.5 * gammaln(n + 1))
    psi = np.zeros(hs.dim, dtype=complex)
    psi[: hs.n_levels] = amps
    if normalize:
        psi /= np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def fock_state(hs: HilbertSpace, n: int, q1: int = 0, q2: int = 0) -> np.ndarray:
    psi = hs.ket(q1, q2, n)
    return np.outer(psi, psi.conj())


@dataclass(frozen=True, eq=False)
class ManifoldSpectrum:
    excitations: int
    eigenvalues: np.ndarray
    states: np.ndarray
    basis_indices: np.ndarray


def manifold_indices(hs: HilbertSpace, m: int) -> np.ndarray:
    return np.flatnonzero(hs.excitation_numbers == m)


def manifold_spectrum(params: SystemParams, hs: HilbertSpace, m: int) -> ManifoldSpectrum:
    """Eigenvalues of the undriven Hamiltonian inside the ``m``-excitation block.

    Manifolds that reach the photon cutoff are incomplete; request
    ``m <= n_max`` for physical results.
    """
    if m < 0:
        raise InvalidParameterError("excitation number must be non-negative")
    idx = manifold_indices(hs, m)
    if idx.size == 0:
        raise InvalidParameterError(f"manifold m={m} is empty at n_max={hs.n_max}")
    h = hamiltonian(params.replace(omega_p=0.0), hs).full()
    block = h[np.ix_(idx, idx)]
    evals, evecs = np.linalg.eigh(block)
    return ManifoldSpectrum(m, evals, evecs, idx)


def symmetric_single_excitation_block(params: SystemParams) -> np.ndarray:
    """Undriven Hamiltonian on ``{|gg,1>, |+,0>}``; ``|-,0>`` sits apart at ``-s delta_a - J``."""
    s = params.detuning_sign
    c = math.sqrt(2.0) * params.g
    return np.array([[-s * params.delta_c, c], [c, -s * params.delta_a + params.j_ddi]])


def antisymmetric_population(rho: np.ndarray, hs: HilbertSpace) -> float:
    """Total population of the antisymmetric states ``(|eg,n> - |ge,n>)/sqrt(2)``."""
    total = 0.0
    for n in range(hs.n_levels):
        v = (hs.ket(1, 0, n) - hs.ket(0, 1, n)) / math.sqrt(2.0)
        total += float(np.real(v.conj() @ rho @ v))
    return total
