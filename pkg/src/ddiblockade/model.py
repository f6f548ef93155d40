"""
Physical parameters, the driven two-qubit cavity Hamiltonian and the
analytic photon-blockade conditions.

All frequencies and rates are expressed in units of the cavity decay rate
``kappa`` (default 1).  Detunings are pump minus transition frequency,
``delta_a = w_p - w_a`` and ``delta_c = w_p - w_c``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields, replace

import numpy as np

from .exceptions import InvalidParameterError, NoSolutionError, SingularGeometryError
from .hilbert import HilbertSpace, Operator, annihilation, lowering

SIGN_CONVENTIONS = ("eq1", "collective")


@dataclass(frozen=True)
class SystemParams:
    """Model parameters in units of the cavity decay rate.

    ``sign_convention`` selects the overall sign of the bare detuning terms:
    ``"eq1"`` gives ``-delta_a sum(s+ s) - delta_c a+ a`` (rotating frame with
    detunings defined as pump minus transition), ``"collective"`` flips both.
    """

    delta_a: float = 0.0
    delta_c: float = 0.0
    g: float = 0.0
    j_ddi: float = 0.0
    gamma: float = 1.0
    gamma_collective: float = 0.0
    kappa: float = 1.0
    omega_p: float = 0.0
    sign_convention: str = "eq1"

    def __post_init__(self):
        for f in fields(self):
            if f.name == "sign_convention":
                continue
            value = getattr(self, f.name)
            try:
                value = float(value)
            except (TypeError, ValueError):
                raise InvalidParameterError(f"{f.name} must be a real number, got {value!r}") from None
            if not math.isfinite(value):
                raise InvalidParameterError(f"{f.name} must be finite, got {value!r}")
            object.__setattr__(self, f.name, value)
        if self.sign_convention not in SIGN_CONVENTIONS:
            raise InvalidParameterError(f"sign_convention must be one of {SIGN_CONVENTIONS}")
        if self.kappa <= 0:
            raise InvalidParameterError("kappa must be positive")
        for name in ("gamma", "g", "omega_p"):
            if getattr(self, name) < 0:
                raise InvalidParameterError(f"{name} must be non-negative")
        if abs(self.gamma_collective) > self.gamma * (1 + 1e-12):
            raise InvalidParameterError(
                "|gamma_collective| must not exceed gamma (damping matrix must stay positive)"
            )

    @property
    def detuning_sign(self) -> int:
        return 1 if self.sign_convention == "eq1" else -1

    def replace(self, **changes) -> "SystemParams":
        return replace(self, **changes)

    def as_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_geometry(cls, geom: "Geometry", **kwargs) -> "SystemParams":
        """Parameters with ``j_ddi`` and ``gamma_collective`` derived from ``geom``."""
        for key in ("j_ddi", "gamma_collective"):
            if key in kwargs:
                raise InvalidParameterError(f"{key} is derived from the geometry, do not pass it")
        gamma = float(kwargs.get("gamma", 1.0))
        return cls(
            j_ddi=ddi_coupling(geom, gamma),
            gamma_collective=collective_rate(geom, gamma),
            **kwargs,
        )


PARAM_NAMES = tuple(f.name for f in fields(SystemParams) if f.name != "sign_convention")


@dataclass(frozen=True)
class Geometry:
    """Relative placement of the two dipoles.

    ``theta`` is the angle between dipole moment and separation vector,
    ``kd`` the separation in units of the reduced transition wavelength.
    """

    theta: float
    kd: float

    def __post_init__(self):
        if not self.kd > 0:
            raise SingularGeometryError(f"kd must be positive, got {self.kd!r}")


def hamiltonian(params: SystemParams, hs: HilbertSpace) -> Operator:
    """Rotating-frame Hamiltonian with DDI exchange and coherent qubit drive."""
    a = annihilation(hs)
    ad = a.dag()
    s1, s2 = lowering(hs, 1), lowering(hs, 2)
    s1d, s2d = s1.dag(), s2.dag()
    s = params.detuning_sign

    h = (-s * params.delta_a) * (s1d @ s1 + s2d @ s2)
    h = h + (-s * params.delta_c) * (ad @ a)
    h = h + params.g * (ad @ s1 + a @ s1d + ad @ s2 + a @ s2d)
    h = h + params.j_ddi * (s1 @ s2d + s2 @ s1d)
    h = h + params.omega_p * (s1 + s1d + s2 + s2d)
    return h


def _geometry_terms(geom: Geometry):
    x = geom.kd
    c2 = math.cos(geom.theta) ** 2
    return x, 1.0 - c2, 1.0 - 3.0 * c2


def ddi_coupling(geom: Geometry, gamma: float) -> float:
    """Coherent dipole-dipole exchange strength ``J`` for two identical dipoles."""
    x, perp, aniso = _geometry_terms(geom)
    return 0.75 * gamma * (
        -perp * math.cos(x) / x + aniso * (math.sin(x) / x**2 + math.cos(x) / x**3)
    )


def collective_rate(geom: Geometry, gamma: float) -> float:
    """Cross damping rate ``gamma'`` from the shared radiation reservoir.

    For small ``kd`` the bracket suffers cancellation between terms of
    order ``1/kd``; a Taylor series is used below ``kd = 1e-2``.
    """
    x, perp, aniso = _geometry_terms(geom)
    if x < 1e-2:
        # sin(x)/x ~ 1 - x^2/6 + x^4/120, cos/x^2 - sin/x^3 ~ -1/3 + x^2/30 - x^4/840
        first = 1 - x**2 / 6 + x**4 / 120
        second = -1 / 3 + x**2 / 30 - x**4 / 840
    else:
        first = math.sin(x) / x
        second = math.cos(x) / x**2 - math.sin(x) / x**3
    return 1.5 * gamma * (perp * first + aniso * second)


def ela_detuning(g: float, delta_c: float, j_ddi: float = 0.0) -> float:
    """Qubit detuning that puts the pump on the lower single-excitation dressed state.

    Solves ``2 g**2 = delta_c * (delta_a - J)`` for ``delta_a``.
    """
    if delta_c == 0:
        raise NoSolutionError("ELA condition has no solution for delta_c = 0")
    return j_ddi + 2.0 * g**2 / delta_c


def ela_residual(g: float, delta_a: float, delta_c: float, j_ddi: float = 0.0) -> float:
    return 2.0 * g**2 - delta_c * (delta_a - j_ddi)


def qdi_condition(delta_a: float) -> float:
    """Cavity detuning giving destructive two-photon interference, ``-2 delta_a``.

    The condition contains neither ``g`` nor ``J``; see
    :func:`ddiblockade.amplitudes.qdi_root_scan` for the numerical check.
    """
    return -2.0 * delta_a


def qdi_residual(delta_a: float, delta_c: float) -> float:
    return delta_c + 2.0 * delta_a


def hybrid_j(g: float, delta_a: float) -> float:
    """DDI strength that makes the ELA and QDI operating points coincide.

    With ``delta_c = -2 delta_a`` the ELA condition reads
    ``g**2 = -delta_a * (delta_a - J)``.
    """
    if delta_a == 0:
        raise NoSolutionError("hybrid condition has no solution for delta_a = 0")
    return delta_a + g**2 / delta_a


def hybrid_residual(g: float, delta_a: float, j_ddi: float) -> float:
    return g**2 + delta_a * (delta_a - j_ddi)


def hybrid_threshold_met(g: float, j_ddi: float) -> bool:
    """True when ``delta_a**2 - J delta_a + g**2 = 0`` has real roots, i.e. ``J >= 2g``."""
    return j_ddi**2 - 4.0 * g**2 >= 0


def hybrid_detunings(g: float, j_ddi: float) -> tuple:
    """Real qubit detunings satisfying the hybrid condition at given ``g`` and ``J``.

    Returns an empty tuple below threshold, one value at ``J = 2g``, else two.
    """
    disc = j_ddi**2 - 4.0 * g**2
    if disc < 0:
        return ()
    if disc == 0:
        return (j_ddi / 2.0,)
    root = math.sqrt(disc)
    return ((j_ddi - root) / 2.0, (j_ddi + root) / 2.0)


def excitation_number(hs: HilbertSpace) -> Operator:
    """Total excitation operator ``a+ a + sum_j s_j+ s_j`` (diagonal)."""
    return Operator(np.diag(hs.excitation_numbers.astype(complex)))
