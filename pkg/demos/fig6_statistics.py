"""Photon-number statistics at the hybrid operating point.

At J = 2g the hybrid condition has the single root delta_a = g. The script
prints P(n) and the relative deviation from a Poisson distribution of the same
mean for both signs of the qubit detuning (delta_a = +g blocks, delta_a = -g
bunches), then scans the drive strength for three qubit linewidths.

Run with ``python3 demos/fig6_statistics.py``.
"""

import numpy as np

from ddiblockade.hilbert import HilbertSpace
from ddiblockade.model import SystemParams
from ddiblockade.observables import photon_statistics
from ddiblockade.solvers import solve

N_MAX = 8


def stats(params):
    return photon_statistics(solve(params, N_MAX).rho, HilbertSpace(N_MAX))


def main():
    g = 2.0
    for sign in (+1, -1):
        p = SystemParams(g=g, j_ddi=2 * g, delta_a=sign * g, delta_c=-2 * sign * g, gamma=1.0, omega_p=0.2)
        s = stats(p)
        print(f"delta_a = {p.delta_a:+.0f}: g2 = {s.g2_zero:.3e}, <n> = {s.mean_n:.3e}")
        for k in range(5):
            dev = s.deviation(k)
            print(f"  n={k}  P={s.p_n[k]:.3e}  (P-Poisson)/Poisson = {'n/a' if dev is None else f'{dev:+.4f}'}")

    print("\ng2(0) versus drive at delta_a = g:")
    drives = np.array([0.01, 0.05, 0.1, 0.2, 0.3, 0.5])
    print("  omega_p  " + "  ".join(f"{w:>9.2f}" for w in drives))
    for gamma in (0.1, 0.5, 1.0):
        row = [stats(SystemParams(g=g, j_ddi=2 * g, delta_a=g, delta_c=-2 * g, gamma=gamma, omega_p=w)).g2_zero for w in drives]
        print(f"  gamma={gamma:<3}" + "  ".join(f"{v:9.2e}" for v in row))


if __name__ == "__main__":
    main()
