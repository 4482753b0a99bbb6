"""Distilling a four-qubit GHZ state from one unit with a deformed POVM.

The center spin is measured with outcome-labeled elements F_x, F_y, F_z.
For 3a^2 >= 1 every outcome yields a GHZ state (STANDARD regime); below that
the z outcome only fires on the |+-1/2> sector and is treated as a qubit
loss (LOSSY regime). After an x or y outcome the global rotations U_y or U_x
bring the GHZ state back to the z basis, and the center is re-encoded as a
qubit with |1> = |3/2>, |0> = -|-3/2>.
"""

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np
from scipy import linalg

from .constants import LEAKAGE_TOL
from .spin_hilbert import embed, spin_operators, total_spin
from .thermal_state import ThermalState

__all__ = [
    "Regime",
    "PovmSet",
    "LogicalGhzState",
    "LeakageError",
    "GHZ",
    "deformation_operator",
    "axis_rotation",
    "filter_projector",
    "povm_standard",
    "povm_lossy",
    "povm_for",
    "regime_for",
    "basis_fixers",
    "encoding_isometry",
    "encode_logical",
    "distill_channel",
    "p_delete",
    "ghz_fidelity",
]

GHZ = np.zeros(16, dtype=complex)
GHZ[0] = GHZ[15] = 1.0 / np.sqrt(2.0)


class LeakageError(RuntimeError):
    """Post-measurement state has weight outside the logical center subspace."""


class Regime(str, Enum):
    STANDARD = "standard"
    LOSSY = "lossy"


@dataclass(frozen=True)
class PovmSet:
    regime: Regime
    a: float
    elements: dict

    def completeness_error(self):
        total = sum(F.conj().T @ F for F in self.elements.values())
        return float(np.max(np.abs(total - np.eye(4))))

    def max_norm(self):
        return max(float(np.linalg.norm(F, 2)) for F in self.elements.values())


@dataclass(frozen=True)
class LogicalGhzState:
    rho16: np.ndarray
    p_s: float
    leakage: float = 0.0

    @property
    def fidelity(self):
        return ghz_fidelity(self.rho16)


def ghz_fidelity(rho16):
    return float(np.real(GHZ.conj() @ rho16 @ GHZ))


def deformation_operator(a):
    """diag(1, a, a, 1) on the center spin."""
    if a <= 0:
        raise ValueError(f"a must be positive, got {a}")
    return np.diag([1.0, a, a, 1.0]).astype(complex)


def regime_for(a):
    return Regime.STANDARD if 3.0 * a * a >= 1.0 else Regime.LOSSY


@lru_cache(maxsize=None)
def axis_rotation(axis):
    """Spin-3/2 rotation taking the z axis onto ``axis``.

    exp(-i pi/2 Sy) maps z to x and exp(+i pi/2 Sx) maps z to y; z is the
    identity. Applying these to |+-3/2>_z fixes the phases of the axis
    eigenvectors without an eigensolver.
    """
    ops = spin_operators(1.5)
    if axis == "x":
        R = linalg.expm(-0.5j * np.pi * ops.Sy)
    elif axis == "y":
        R = linalg.expm(0.5j * np.pi * ops.Sx)
    elif axis == "z":
        R = np.eye(4, dtype=complex)
    else:
        raise ValueError(f"axis must be x, y or z, got {axis!r}")
    R.setflags(write=False)
    return R


def filter_projector(axis):
    """sqrt(2/3) (|3/2>_a<3/2|_a + |-3/2>_a<-3/2|_a) for a in {x, y, z}."""
    R = axis_rotation(axis)
    up, down = R[:, 0], R[:, 3]
    P = np.outer(up, up.conj()) + np.outer(down, down.conj())
    return np.sqrt(2.0 / 3.0) * P


def povm_standard(a):
    """Deformed POVM F_a = q_a * filter_a * D(a), valid for 3a^2 >= 1.

    q_x = q_y = 1/a and q_z = sqrt((3a^2 - 1) / (2a^2)) make the set complete.
    """
    if a <= 0 or 3.0 * a * a < 1.0:
        raise ValueError(f"standard POVM requires a >= 1/sqrt(3), got a={a}")
    D = deformation_operator(a)
    q_z = np.sqrt((3.0 * a * a - 1.0) / (2.0 * a * a))
    elements = {
        "x": filter_projector("x") @ D / a,
        "y": filter_projector("y") @ D / a,
        "z": q_z * filter_projector("z") @ D,
    }
    return PovmSet(Regime.STANDARD, float(a), elements)


def povm_lossy(a):
    """POVM for a < 1/sqrt(3); the z outcome is the loss event."""
    if a <= 0 or 3.0 * a * a >= 1.0:
        raise ValueError(f"lossy POVM requires 0 < a < 1/sqrt(3), got a={a}")
    D = deformation_operator(a)
    r = np.sqrt(1.0 - 3.0 * a * a)
    elements = {
        "x": np.sqrt(3.0) * filter_projector("x") @ D,
        "y": np.sqrt(3.0) * filter_projector("y") @ D,
        "z": np.diag([0.0, r, r, 0.0]).astype(complex),
    }
    return PovmSet(Regime.LOSSY, float(a), elements)


def povm_for(a):
    return povm_standard(a) if regime_for(a) is Regime.STANDARD else povm_lossy(a)


@lru_cache(maxsize=None)
def basis_fixers():
    """Return (U_x, U_y) acting on the whole unit.

    U_y = exp[i pi/2 (total Sy)] follows an x outcome and U_x = exp[-i pi/2
    (total Sx)] follows a y outcome.
    """
    U_y = linalg.expm(0.5j * np.pi * total_spin("y").matrix)
    U_x = linalg.expm(-0.5j * np.pi * total_spin("x").matrix)
    for U in (U_x, U_y):
        U.setflags(write=False)
    return U_x, U_y


@lru_cache(maxsize=None)
def encoding_isometry():
    """32x16 isometry from the logical (center, q1, q2, q3) qubits into the unit."""
    V = np.zeros((32, 16), dtype=complex)
    for bits in range(8):
        V[0 * 8 + bits, 8 + bits] = 1.0   # logical 1 -> |3/2>
        V[3 * 8 + bits, 0 + bits] = -1.0  # logical 0 -> -|-3/2>
    V.setflags(write=False)
    return V


def encode_logical(rho32, tol=LEAKAGE_TOL):
    """Compress a unit state supported on center |+-3/2> into four qubits.

    Returns
    -------
    rho16 : ndarray
        Renormalized 16x16 density matrix.
    leakage : float
        Fraction of the input trace outside the logical subspace.

    Raises
    ------
    LeakageError
        If the leakage exceeds ``tol``; the rotations are exact, so this
        signals a convention error upstream.
    """
    rho32 = np.asarray(rho32)
    V = encoding_isometry()
    rho16 = V.conj().T @ rho32 @ V
    total = float(np.real(np.trace(rho32)))
    kept = float(np.real(np.trace(rho16)))
    if total <= 0:
        raise ValueError("input state has no weight")
    leakage = max(0.0, 1.0 - kept / total)
    if leakage > tol:
        raise LeakageError(f"leakage {leakage:.3e} outside the logical subspace exceeds {tol:.0e}")
    rho16 = rho16 / kept
    return 0.5 * (rho16 + rho16.conj().T), leakage


def _branch(F, rho, U=None):
    M = embed(F, 0).matrix
    if U is not None:
        M = U @ M
    return M @ rho @ M.conj().T


def distill_channel(rho, a):
    """Outcome-averaged GHZ distillation of a unit state.

    Parameters
    ----------
    rho : ThermalState or ndarray
        32x32 unit density matrix.
    a : float
        Deformation parameter; the regime follows from 3a^2 >= 1.

    Returns
    -------
    LogicalGhzState
    """
    if isinstance(rho, ThermalState):
        rho = rho.rho
    povm = povm_for(a)
    U_x, U_y = basis_fixers()
    F = povm.elements
    kept = _branch(F["x"], rho, U_y) + _branch(F["y"], rho, U_x)
    if povm.regime is Regime.STANDARD:
        kept = kept + _branch(F["z"], rho)
        p_s = 1.0
    else:
        lost = _branch(F["z"], rho)
        p_s = 1.0 - float(np.real(np.trace(lost)))
        kept = kept / p_s
    rho16, leakage = encode_logical(kept)
    return LogicalGhzState(rho16=rho16, p_s=p_s, leakage=leakage)


def p_delete(a):
    """Probability of the loss outcome at zero temperature, (1 - 3a^2)/(1 + a^2)."""
    if a <= 0:
        raise ValueError(f"a must be positive, got {a}")
    if 3.0 * a * a >= 1.0:
        return 0.0
    return (1.0 - 3.0 * a * a) / (1.0 + a * a)
