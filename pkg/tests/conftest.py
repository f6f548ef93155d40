import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st

from ddiblockade.model import SystemParams

settings.register_profile("default", deadline=None)
settings.load_profile("default")


def random_density_matrix(dim: int, rng: np.random.Generator) -> np.ndarray:
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = m @ m.conj().T
    return rho / np.trace(rho)


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (m + m.conj().T) / 2


@st.composite
def system_params(draw, max_detuning=30.0, min_drive=0.0):
    gamma = draw(st.floats(0.05, 3.0))
    return SystemParams(
        delta_a=draw(st.floats(-max_detuning, max_detuning)),
        delta_c=draw(st.floats(-max_detuning, max_detuning)),
        g=draw(st.floats(0.0, 10.0)),
        j_ddi=draw(st.floats(-20.0, 20.0)),
        gamma=gamma,
        gamma_collective=draw(st.floats(-1.0, 1.0)) * gamma,
        kappa=draw(st.floats(0.2, 3.0)),
        omega_p=draw(st.floats(min_drive, 0.3)),
    )


# The six figure parameter sets (rates in units of kappa, gamma_collective = 0).
FIGURE_PARAMS = {
    "fig2c": SystemParams(delta_a=15, delta_c=-30, g=5, gamma=1, omega_p=0.1, j_ddi=0),
    "fig3": SystemParams(delta_a=15, delta_c=-30, g=5, gamma=1, omega_p=0.1, j_ddi=17.5),
    "fig4": SystemParams(delta_a=10, delta_c=-20, g=5, gamma=1, omega_p=0.1, j_ddi=12.5),
    "fig5": SystemParams(delta_a=5, delta_c=-10, g=5, gamma=1, omega_p=0.1, j_ddi=10),
    "fig6a": SystemParams(delta_a=2, delta_c=-4, g=2, gamma=0.1, omega_p=0.2, j_ddi=4),
    "fig6b": SystemParams(delta_a=2, delta_c=-4, g=2, gamma=1, omega_p=0.2, j_ddi=4),
}


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# One line per acceptance criterion, collected by tests/test_acceptance.py and
# repeated in the terminal summary so that it shows up without -s.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
