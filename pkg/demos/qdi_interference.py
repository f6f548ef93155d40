"""Destructive interference of two-photon amplitudes.

In the weak-drive limit the state is truncated to six collective amplitudes.
The two-photon amplitude c(gg,2) vanishes at delta_c = -2 delta_a for any g
when the linewidths are small; finite linewidths shift the zero. The script
prints the ideal and the shifted minimisers and compares the amplitude proxy
with the full master-equation g2(0).

Run with ``python3 demos/qdi_interference.py``.
"""

from ddiblockade.amplitudes import linewidth_offset, perturbative_amplitudes, qdi_root_scan
from ddiblockade.hilbert import HilbertSpace
from ddiblockade.model import SystemParams, qdi_condition
from ddiblockade.observables import g2_zero
from ddiblockade.solvers import solve


def main():
    delta_a = 15.0
    couplings = [1.0, 2.0, 5.0, 10.0]
    print(f"ideal QDI condition: delta_c = {qdi_condition(delta_a):.4f}")
    for width in (0.01, 1.0):
        template = SystemParams(delta_a=delta_a, gamma=width, kappa=width, omega_p=0.01 * width)
        roots = qdi_root_scan(template, couplings)
        print(f"gamma = kappa = {width}:")
        for g, r in zip(couplings, roots):
            print(f"  g = {g:4.1f}  minimiser delta_c = {r:9.4f}")

    p = SystemParams(delta_a=delta_a, delta_c=-30.0, g=5.0, gamma=1.0, omega_p=0.05)
    print(f"\nlinewidth shift at g=5, gamma=kappa=1: {linewidth_offset(p):+.3f}")
    hs = HilbertSpace(4)
    print("delta_c    proxy g2     master-equation g2")
    for dc in (-34.0, -32.0, -31.33, -30.0, -28.0):
        q = p.replace(delta_c=dc)
        print(f"{dc:7.2f}   {perturbative_amplitudes(q).g2_proxy:.4e}   {g2_zero(solve(q, 4).rho, hs):.4e}")


if __name__ == "__main__":
    main()
