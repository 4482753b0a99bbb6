"""Quantum computational power of thermal spin-3/2 unit models.

Exact diagonalization of one unit, GHZ distillation by a deformed POVM,
Pauli error extraction, propagation to cluster-state errors, site
percolation, and the resulting universality phase diagrams.
"""

__version__ = "0.1.0"

from .unit_models import Model, ModelParams, spectrum, analytic_ground_energy, deformation_parameter
from .thermal_state import thermal_state
from .ghz_distill import distill_channel, povm_for, p_delete
from .pauli_channel import PAULI_CLASSES, twirl, extract_error_probs, format_report
from .cluster_errors import phase_error_rate, loss_rate, verify_propagation_oracle
from .percolation import LatticeSpec, site_threshold, zero_T_boundary, k_curve, load_k_table
from .phase_boundary import evaluate_point, boundary_temperature, sweep

__all__ = [
    "Model", "ModelParams", "spectrum", "analytic_ground_energy", "deformation_parameter",
    "thermal_state", "distill_channel", "povm_for", "p_delete",
    "PAULI_CLASSES", "twirl", "extract_error_probs", "format_report",
    "phase_error_rate", "loss_rate", "verify_propagation_oracle",
    "LatticeSpec", "site_threshold", "zero_T_boundary", "k_curve", "load_k_table",
    "evaluate_point", "boundary_temperature", "sweep",
]
