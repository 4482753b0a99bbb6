"""Numerical tolerances and published threshold constants used across the package.

Energies and temperatures are in units of the unit coupling with k_B = hbar = 1.
"""

import numpy as np

# algebraic identities (commutators, hermiticity, completeness)
ALGEBRA_TOL = 1e-12
# eigen-solves and eigenvector checks
EIGEN_TOL = 1e-9
# two levels closer than this count as degenerate
DEGENERACY_TOL = 1e-7
# weight outside the logical center subspace tolerated by the encoder
LEAKAGE_TOL = 1e-8

# qubit loss tolerated by the 2D square-lattice cluster state
LOSS_TOLERANCE_2D = 0.40
# 2D cluster-state FTQC threshold on the renormalized phase error
PHASE_THRESHOLD_2D = 1e-7
# 3D topological thresholds: pure loss and pure phase flip
LOSS_THRESHOLD_3D = 0.249
PHASE_THRESHOLD_3D = 0.0293

# site percolation thresholds (literature values)
SITE_THRESHOLDS = {
    "honeycomb": 0.6970,
    "square-octagon": 0.7297,
    "square": 0.5927,
}

# upper end of the temperature bracket for boundary solving
T_MAX = 5.0

# deformation below which the lossy POVM is required
A_LOSSY = 1.0 / np.sqrt(3.0)
