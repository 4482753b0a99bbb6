"""Gibbs state of a single unit."""

from dataclasses import dataclass

import numpy as np

from .constants import DEGENERACY_TOL
from .unit_models import ModelParams, eigensystem

__all__ = ["ThermalState", "thermal_state", "boltzmann_weights"]


@dataclass(frozen=True)
class ThermalState:
    rho: np.ndarray
    T: float
    params: ModelParams

    def expectation(self, op):
        op = getattr(op, "matrix", op)
        return float(np.real(np.trace(self.rho @ op)))

    @property
    def purity(self):
        return float(np.real(np.trace(self.rho @ self.rho)))


def boltzmann_weights(energies, T):
    """Normalized Boltzmann populations, with exponents shifted by the ground energy.

    At ``T == 0`` the ground space (levels within the degeneracy tolerance)
    is populated uniformly.
    """
    if T < 0:
        raise ValueError(f"temperature must be non-negative, got {T}")
    shifted = np.asarray(energies, dtype=float) - np.min(energies)
    if T == 0:
        weights = (shifted <= DEGENERACY_TOL).astype(float)
    else:
        with np.errstate(over="ignore"):  # huge exponents underflow to weight 0
            weights = np.exp(-shifted / T)
    return weights / weights.sum()


def thermal_state(params, T):
    """rho_T = exp(-H/T) / Tr exp(-H/T) from the cached eigendecomposition."""
    T = float(T)
    w, v = eigensystem(params)
    p = boltzmann_weights(w, T)
    rho = (v * p) @ v.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return ThermalState(rho=rho, T=T, params=params)
