"""
Vectorised master-equation generator.

Density matrices are flattened column by column (Fortran order), so that
``vec(A @ rho @ B) = kron(B.T, A) @ vec(rho)``.  Every dissipator follows
the ``r * (2 A rho B+ - B+ A rho - rho B+ A)`` form, which puts the photon
number decay rate at ``2 kappa``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, List, Sequence

import numpy as np
import scipy.sparse as sp

from .exceptions import DimensionMismatchError, InvalidParameterError
from .hilbert import HilbertSpace, Operator, annihilation, lowering
from .model import SystemParams, hamiltonian


@dataclass(frozen=True)
class CollapseChannel:
    """Dissipative channel ``rate * (2 A rho B+ - B+ A rho - rho B+ A)``.

    ``left is right`` gives an ordinary Lindblad term; distinct operators
    give the cross terms of collective damping.
    """

    left: Operator
    right: Operator
    rate: float

    def __post_init__(self):
        if self.left.dim != self.right.dim:
            raise DimensionMismatchError(
                f"channel operators differ in dimension: {self.left.dim} vs {self.right.dim}"
            )

    @property
    def is_diagonal(self) -> bool:
        return self.left is self.right or self.left == self.right


@dataclass(frozen=True, eq=False)
class Liouvillian:
    dim: int
    generator: sp.csc_matrix

    @property
    def superdim(self) -> int:
        return self.dim * self.dim

    def dense(self) -> np.ndarray:
        return self.generator.toarray()


def vec(rho: np.ndarray) -> np.ndarray:
    return np.asarray(rho).reshape(-1, order="F")


def unvec(v: np.ndarray, dim: int) -> np.ndarray:
    return np.asarray(v).reshape(dim, dim, order="F")


def _commutator_super(h: sp.spmatrix, eye: sp.spmatrix) -> sp.spmatrix:
    return -1j * (sp.kron(eye, h) - sp.kron(h.T, eye))


def _dissipator_super(a: sp.spmatrix, b: sp.spmatrix, eye: sp.spmatrix) -> sp.spmatrix:
    bda = b.conj().T @ a
    return 2 * sp.kron(b.conj(), a) - sp.kron(eye, bda) - sp.kron(bda.T, eye)


def build(h: Operator, channels: Iterable[CollapseChannel] = ()) -> Liouvillian:
    """Assemble the generator from a Hamiltonian and a list of channels."""
    d = h.dim
    eye = sp.identity(d, dtype=complex, format="csr")
    gen = _commutator_super(h.data, eye)
    for ch in channels:
        if ch.left.dim != d:
            raise DimensionMismatchError(f"channel dim {ch.left.dim} != Hamiltonian dim {d}")
        if ch.rate < 0 and ch.is_diagonal:
            raise InvalidParameterError(f"negative rate {ch.rate} on a diagonal channel")
        if ch.rate == 0:
            continue
        gen = gen + ch.rate * _dissipator_super(ch.left.data, ch.right.data, eye)
    gen = sp.csc_matrix(gen)
    gen.sum_duplicates()
    return Liouvillian(d, gen)


def standard_channels(params: SystemParams, hs: HilbertSpace) -> List[CollapseChannel]:
    """Cavity leakage, independent qubit decay and the two collective cross terms."""
    a = annihilation(hs)
    s1, s2 = lowering(hs, 1), lowering(hs, 2)
    return [
        CollapseChannel(a, a, params.kappa),
        CollapseChannel(s1, s1, params.gamma),
        CollapseChannel(s2, s2, params.gamma),
        CollapseChannel(s1, s2, params.gamma_collective),
        CollapseChannel(s2, s1, params.gamma_collective),
    ]


def apply(L: Liouvillian, rho: np.ndarray) -> np.ndarray:
    """Time derivative ``d rho / dt`` as a dense matrix."""
    rho = np.asarray(rho)
    if rho.shape != (L.dim, L.dim):
        raise DimensionMismatchError(f"state shape {rho.shape} does not match dim {L.dim}")
    return unvec(L.generator @ vec(rho), L.dim)


def lindblad_rhs(h: Operator, channels: Sequence[CollapseChannel], rho: np.ndarray) -> np.ndarray:
    """Direct matrix-product evaluation of the master equation (no vectorisation)."""
    H = h.full()
    out = -1j * (H @ rho - rho @ H)
    for ch in channels:
        A, B = ch.left.full(), ch.right.full()
        Bd = B.conj().T
        BdA = Bd @ A
        out += ch.rate * (2 * A @ rho @ Bd - BdA @ rho - rho @ BdA)
    return out


@lru_cache(maxsize=16)
def _pieces(n_max: int):
    """Generator pieces for the standard model on a common sparsity pattern.

    Returns ``(template, names, data)`` where ``data[k]`` holds the values of
    piece ``names[k]`` laid out on ``template``'s pattern.
    """
    hs = HilbertSpace(n_max)
    eye = sp.identity(hs.dim, dtype=complex, format="csr")
    a = annihilation(hs).data
    s1, s2 = lowering(hs, 1).data, lowering(hs, 2).data
    ad, s1d, s2d = a.conj().T, s1.conj().T, s2.conj().T
    terms = {
        "n_qubit": _commutator_super(s1d @ s1 + s2d @ s2, eye),
        "n_cavity": _commutator_super(ad @ a, eye),
        "g": _commutator_super(ad @ s1 + a @ s1d + ad @ s2 + a @ s2d, eye),
        "j_ddi": _commutator_super(s1 @ s2d + s2 @ s1d, eye),
        "omega_p": _commutator_super(s1 + s1d + s2 + s2d, eye),
        "kappa": _dissipator_super(a, a, eye),
        "gamma": _dissipator_super(s1, s1, eye) + _dissipator_super(s2, s2, eye),
        "gamma_collective": _dissipator_super(s1, s2, eye) + _dissipator_super(s2, s1, eye),
    }
    names = tuple(terms)
    # Union pattern: sum of absolute values cannot cancel.
    template = sp.csc_matrix(sum(abs(t) for t in terms.values()), dtype=complex)
    template.sort_indices()
    rows = template.indices
    cols = np.repeat(np.arange(template.shape[1]), np.diff(template.indptr))
    data = np.array([np.asarray(sp.csr_matrix(terms[n])[rows, cols]).ravel() for n in names])
    data.setflags(write=False)
    return template, names, data


def system_liouvillian(params: SystemParams, hs: HilbertSpace) -> Liouvillian:
    """Generator for ``params`` identical to ``build(hamiltonian(...), standard_channels(...))``.

    Uses cached pieces, so repeated calls at one cutoff only cost a
    weighted sum of data vectors.
    """
    template, names, data = _pieces(hs.n_max)
    s = params.detuning_sign
    coef = {
        "n_qubit": -s * params.delta_a,
        "n_cavity": -s * params.delta_c,
        "g": params.g,
        "j_ddi": params.j_ddi,
        "omega_p": params.omega_p,
        "kappa": params.kappa,
        "gamma": params.gamma,
        "gamma_collective": params.gamma_collective,
    }
    weights = np.array([coef[n] for n in names], dtype=float)
    gen = sp.csc_matrix((weights @ data, template.indices, template.indptr), shape=template.shape)
    return Liouvillian(hs.dim, gen)


def reference_liouvillian(params: SystemParams, hs: HilbertSpace) -> Liouvillian:
    """Slow path: explicit Hamiltonian plus channel list."""
    return build(hamiltonian(params, hs), standard_channels(params, hs))
