"""
Composite Hilbert space of two qubits and one truncated cavity mode.

Basis ordering is qubit-major, cavity-minor: the state ``|q1 q2, n>`` sits at
index ``(2*q1 + q2) * (n_max + 1) + n`` with ``q = 0`` for ``|g>`` and
``q = 1`` for ``|e>``.  Operators are stored as CSR matrices in complex
double precision.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterator, Tuple

import numpy as np
import scipy.sparse as sp

from .exceptions import DimensionMismatchError, InvalidCutoffError, InvalidIndexError

QUBIT_LABELS = ("g", "e")


@dataclass(frozen=True)
class HilbertSpace:
    """Two qubits tensored with a Fock space truncated at ``n_max`` photons."""

    n_max: int

    def __post_init__(self):
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise InvalidCutoffError(f"photon cutoff must be an integer >= 1, got {self.n_max!r}")
        object.__setattr__(self, "n_max", int(self.n_max))

    @property
    def n_levels(self) -> int:
        return self.n_max + 1

    @property
    def dim(self) -> int:
        return 4 * self.n_levels

    def index(self, q1: int, q2: int, n: int) -> int:
        if q1 not in (0, 1) or q2 not in (0, 1):
            raise InvalidIndexError(f"qubit labels must be 0 or 1, got ({q1}, {q2})")
        if not 0 <= n <= self.n_max:
            raise InvalidIndexError(f"photon number {n} outside 0..{self.n_max}")
        return (2 * q1 + q2) * self.n_levels + n

    def labels(self, i: int) -> Tuple[int, int, int]:
        """Inverse of :meth:`index`."""
        if not 0 <= i < self.dim:
            raise InvalidIndexError(f"basis index {i} outside 0..{self.dim - 1}")
        q, n = divmod(i, self.n_levels)
        return q // 2, q % 2, n

    def basis(self) -> Iterator[Tuple[int, int, int]]:
        for i in range(self.dim):
            yield self.labels(i)

    def label_str(self, i: int) -> str:
        q1, q2, n = self.labels(i)
        return f"|{QUBIT_LABELS[q1]}{QUBIT_LABELS[q2]},{n}>"

    def ket(self, q1: int, q2: int, n: int) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[self.index(q1, q2, n)] = 1.0
        return v

    @cached_property
    def photon_numbers(self) -> np.ndarray:
        return np.array([self.labels(i)[2] for i in range(self.dim)])

    @cached_property
    def excitation_numbers(self) -> np.ndarray:
        """Total excitation ``q1 + q2 + n`` of every basis state."""
        return np.array([sum(self.labels(i)) for i in range(self.dim)])


def space(n_max: int) -> HilbertSpace:
    """Build the space; cutoffs below 2 cannot represent two-photon events."""
    hs = HilbertSpace(n_max)
    if hs.n_max < 2:
        warnings.warn("n_max < 2: two-photon correlations are identically zero", stacklevel=2)
    return hs


class Operator:
    """Immutable complex operator on a :class:`HilbertSpace`.

    Thin wrapper over a CSR matrix that enforces dimension checks on every
    binary operation.  ``op.data`` gives the underlying sparse matrix.
    """

    __array_priority__ = 100
    __slots__ = ("_m", "_coo")

    def __init__(self, matrix):
        m = sp.csr_matrix(matrix, dtype=complex)
        if m.shape[0] != m.shape[1]:
            raise DimensionMismatchError(f"operator must be square, got {m.shape}")
        m.sum_duplicates()
        m.eliminate_zeros()
        m.data.setflags(write=False)
        self._m = m

    @property
    def data(self) -> sp.csr_matrix:
        return self._m

    @property
    def dim(self) -> int:
        return self._m.shape[0]

    @property
    def nnz(self) -> int:
        return self._m.nnz

    def triplets(self):
        """``(rows, cols, values)`` of the stored entries, computed once."""
        try:
            return self._coo
        except AttributeError:
            m = self._m.tocoo()
            self._coo = (m.row, m.col, m.data)
            return self._coo

    def full(self) -> np.ndarray:
        return self._m.toarray()

    def _check(self, other: "Operator"):
        if not isinstance(other, Operator):
            return NotImplemented
        if other.dim != self.dim:
            raise DimensionMismatchError(f"dimension mismatch: {self.dim} vs {other.dim}")
        return None

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return Operator(self._m + other._m)

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return Operator(self._m - other._m)

    def __neg__(self):
        return Operator(-self._m)

    def __mul__(self, scalar):
        if isinstance(scalar, Operator):
            return self @ scalar
        if not np.isscalar(scalar):
            return NotImplemented
        return Operator(self._m * scalar)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return Operator(self._m @ other._m)

    def __eq__(self, other):
        if not isinstance(other, Operator) or other.dim != self.dim:
            return False
        return (self._m != other._m).nnz == 0

    __hash__ = None

    def dag(self) -> "Operator":
        return Operator(self._m.conj().T)

    def trace(self) -> complex:
        return complex(self._m.diagonal().sum())

    def is_hermitian(self, atol: float = 1e-12) -> bool:
        diff = self._m - self._m.conj().T
        return diff.nnz == 0 or np.max(np.abs(diff.data)) <= atol

    def apply(self, vec: np.ndarray) -> np.ndarray:
        return self._m @ vec

    def __repr__(self):
        return f"Operator(dim={self.dim}, nnz={self.nnz})"


def add(a: Operator, b: Operator) -> Operator:
    return a + b


def scale(a: Operator, c: complex) -> Operator:
    return a * c


def mul(a: Operator, b: Operator) -> Operator:
    return a @ b


def adjoint(a: Operator) -> Operator:
    return a.dag()


def trace(a: Operator) -> complex:
    return a.trace()


def commutator(a: Operator, b: Operator) -> Operator:
    return a @ b - b @ a


def expectation(op: Operator, rho: np.ndarray) -> complex:
    """``Tr(op @ rho)`` evaluated elementwise, without forming the product."""
    rho = np.asarray(rho)
    if rho.shape != (op.dim, op.dim):
        raise DimensionMismatchError(f"operator dim {op.dim} vs state shape {rho.shape}")
    rows, cols, vals = op.triplets()
    return complex(np.sum(vals * rho[cols, rows]))


def identity(hs: HilbertSpace) -> Operator:
    return Operator(sp.identity(hs.dim, dtype=complex, format="csr"))


def _embed(hs: HilbertSpace, q1_op, q2_op, cav_op) -> Operator:
    return Operator(sp.kron(sp.kron(q1_op, q2_op), cav_op, format="csr"))


@lru_cache(maxsize=64)
def annihilation(hs: HilbertSpace) -> Operator:
    """Cavity lowering operator ``a`` with ``a|n> = sqrt(n)|n-1>``."""
    a = sp.diags(np.sqrt(np.arange(1, hs.n_levels)), 1, shape=(hs.n_levels,) * 2)
    eye2 = sp.identity(2)
    return _embed(hs, eye2, eye2, a)


def creation(hs: HilbertSpace) -> Operator:
    return annihilation(hs).dag()


def number(hs: HilbertSpace) -> Operator:
    a = annihilation(hs)
    return a.dag() @ a


_SIGMA_MINUS = sp.csr_matrix(np.array([[0.0, 1.0], [0.0, 0.0]]))


@lru_cache(maxsize=128)
def lowering(hs: HilbertSpace, j: int) -> Operator:
    """Qubit lowering operator ``|g><e|`` acting on qubit ``j`` (1 or 2)."""
    eye2 = sp.identity(2)
    cav = sp.identity(hs.n_levels)
    if j == 1:
        return _embed(hs, _SIGMA_MINUS, eye2, cav)
    if j == 2:
        return _embed(hs, eye2, _SIGMA_MINUS, cav)
    raise InvalidIndexError(f"qubit index must be 1 or 2, got {j!r}")
