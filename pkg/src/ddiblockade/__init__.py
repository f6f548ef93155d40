"""Photon blockade in a driven two-qubit cavity with dipole-dipole interaction.

Steady states of the Lindblad master equation, photon statistics, weak-drive
amplitude analysis and declarative parameter sweeps.
"""

__version__ = "0.1.0"

from .exceptions import BlockadeError
from .hilbert import HilbertSpace, Operator, annihilation, expectation, lowering, space
from .liouvillian import CollapseChannel, Liouvillian, apply, build, standard_channels, system_liouvillian
from .model import (
    Geometry,
    SystemParams,
    collective_rate,
    ddi_coupling,
    ela_detuning,
    hamiltonian,
    hybrid_j,
    qdi_condition,
)
from .observables import g2_zero, manifold_spectrum, mean_photon, photon_statistics
from .solvers import auto_truncate, evolve, solve, steady_state, steady_state_dense_oracle
from .amplitudes import effective_hamiltonian, perturbative_amplitudes, qdi_root_scan

__all__ = [
    "BlockadeError",
    "CollapseChannel",
    "Geometry",
    "HilbertSpace",
    "Liouvillian",
    "Operator",
    "SystemParams",
    "annihilation",
    "apply",
    "auto_truncate",
    "build",
    "collective_rate",
    "ddi_coupling",
    "effective_hamiltonian",
    "ela_detuning",
    "evolve",
    "expectation",
    "g2_zero",
    "hamiltonian",
    "hybrid_j",
    "lowering",
    "manifold_spectrum",
    "mean_photon",
    "perturbative_amplitudes",
    "photon_statistics",
    "qdi_condition",
    "qdi_root_scan",
    "solve",
    "space",
    "standard_channels",
    "steady_state",
    "steady_state_dense_oracle",
    "system_liouvillian",
]
