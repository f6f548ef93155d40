"""Two routes to photon blockade and their combination.

Sweeps the qubit detuning at fixed cavity detuning, locates the g2(0) dips
produced by energy-level anharmonicity (ELA) and by quantum destructive
interference (QDI), then switches on the dipole-dipole exchange J so that both
conditions meet at the same detuning.

Run with ``python3 demos/blockade_mechanisms.py``.
"""

from pathlib import Path

import numpy as np

from ddiblockade.model import ela_detuning, hybrid_j, qdi_condition
from ddiblockade.sweep import load_config, run_sweep

FIGURES = Path(__file__).resolve().parent.parent / "figures"


def dips(x, y):
    i = np.flatnonzero((y[1:-1] < y[:-2]) & (y[1:-1] < y[2:])) + 1
    return list(zip(x[i], y[i]))


def main():
    # --- J = 0: two separate dips -------------------------------------------
    res = run_sweep(load_config(FIGURES / "fig2c.cfg"))
    p = res.config.base
    x, g2, n = res.column("delta_a"), res.column("g2_zero"), res.column("mean_n")
    print(f"g={p.g}, gamma={p.gamma}, kappa={p.kappa}, omega_p={p.omega_p}, delta_c={p.delta_c}")
    print(f"ELA condition: delta_a = {ela_detuning(p.g, p.delta_c):.3f}")
    print(f"QDI condition: delta_a = {-p.delta_c / 2:.3f} (delta_c = -2 delta_a = {qdi_condition(-p.delta_c / 2):.1f})")
    print("local minima of g2(0):")
    for xi, gi in dips(x, g2):
        print(f"  delta_a = {xi:6.2f}   g2 = {gi:.3e}   <n> = {n[np.searchsorted(x, xi)]:.3e}")

    # --- J = 3.5 g: both conditions at delta_a = 15 ---------------------------
    print(f"\nhybrid J at delta_a = 15: {hybrid_j(p.g, 15.0):.3f} = {hybrid_j(p.g, 15.0) / p.g:.3f} g")
    base = run_sweep(load_config(FIGURES / "fig3_j0.cfg"))
    hyb = run_sweep(load_config(FIGURES / "fig3_j3.5g.cfg"))
    i = int(np.argmin(np.abs(base.column("delta_a") - 15.0)))
    for label, r in (("J = 0   ", base), ("J = 3.5g", hyb)):
        print(f"  {label}  g2 = {r.column('g2_zero')[i]:.3e}   <n> = {r.column('mean_n')[i]:.3e}")


if __name__ == "__main__":
    main()
