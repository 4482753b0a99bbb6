"""
Percolation and the zero-temperature boundary
=============================================

Lost units delete sites of the trivalent lattice. The resource stays
useful while the surviving sites percolate, which fixes the smallest
deformation a*^2 = p_th / (4 - p_th) and hence a critical parameter.
"""

import numpy as np

from qcpower.percolation import LatticeSpec, k_curve, site_threshold, spanning_probability, zero_T_boundary
from qcpower.unit_models import Model

for kind in ("honeycomb", "square-octagon", "square"):
    est = site_threshold(LatticeSpec(kind, 96), trials=200, seed=1)
    print(f"{kind:15s} p_th = {est.p_th:.4f} +- {est.stderr:.4f}")

# finite-size spanning curves sharpen around the threshold
for L in (32, 64, 128):
    spec = LatticeSpec("honeycomb", L)
    row = [spanning_probability(spec, p, 200, 1) for p in (0.68, 0.69, 0.70, 0.71)]
    print(f"L = {L:3d}:", " ".join(f"{x:.2f}" for x in row))

est = site_threshold(LatticeSpec("honeycomb", 128), trials=200, seed=1)
print(f"\ndelta* from Monte Carlo p_th: {zero_T_boundary(Model.XXZ, est):.4f}")
print(f"dz*    from reference p_th:   {zero_T_boundary(Model.ANISO, 'honeycomb'):.4f}")
print(f"cross lattice (user p_th 0.7453): {zero_T_boundary(Model.XXZ, p_th=0.7453):.4f}")

# the 2D loss-tolerance factor k(p_l), an approximate estimator
kc = k_curve(np.linspace(0, 0.45, 10), L=64, trials=20, seed=0)
print()
print(kc.to_csv())
