"""
Universality phase diagrams in 2D and 3D
========================================

Each (parameter, T) point is universal when its cluster error rates sit
below the fault-tolerance thresholds. The boundary T*(parameter) is found
by bisection; the grid is written to CSV for external plotting.
"""

import numpy as np

from qcpower.percolation import k_curve
from qcpower.phase_boundary import boundary_temperature, sweep
from qcpower.unit_models import Model

b3 = boundary_temperature(Model.XXZ, 0.0, "3d")
b2 = boundary_temperature(Model.XXZ, 0.0, "2d")
print(f"Heisenberg point: T*3D = {b3.T_star:.4f}, T*2D = {b2.T_star:.4f}, ratio {b3.T_star / b2.T_star:.2f}")

kc = k_curve(np.arange(0, 0.401, 0.025), L=64, trials=20, seed=0)
params = np.round(np.arange(-2.0, 2.001, 0.25), 12)
temps = np.round(np.arange(0.0, 0.3, 0.01), 12)

for model in Model:
    for dim, k in (("2d", kc), ("3d", None)):
        diag = sweep(model, params, temps, dim, kcurve=k, workers=4)
        print(f"\n{model.value} {dim} boundary (k source: {diag.k_source})")
        for b in diag.boundary:
            bar = "#" * int(round(b.T_star * 200))
            print(f"  {b.param:+.2f}  T* = {b.T_star:.4f}  {bar}")

        _, _, mask = diag.universal_mask()
        with open(f"phase_{model.value}_{dim}.csv", "w") as fh:
            fh.write("param,T,universal\n")
            for i, p in enumerate(params):
                for j, T in enumerate(temps):
                    fh.write(f"{p!r},{T!r},{int(mask[i, j])}\n")
