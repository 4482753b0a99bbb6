"""Spin operators and the tensor-product space of one unit.

A unit is a spin-3/2 center particle coupled to three spin-1/2 virtual
qubits. The ordering is fixed everywhere in the package::

    center (x) q1 (x) q2 (x) q3,   index = 8*m_idx + 4*b1 + 2*b2 + b3

with the center basis in descending m (3/2, 1/2, -1/2, -3/2) and the qubit
basis ordered (up, down).
"""

from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from .constants import ALGEBRA_TOL

__all__ = [
    "SpinOperators",
    "UnitOperator",
    "UNIT_DIMS",
    "SLOT_LABELS",
    "spin_operators",
    "embed",
    "dicke_state",
    "unit_basis_index",
    "total_spin",
    "permute_qubits",
]

UNIT_DIMS = (4, 2, 2, 2)
SLOT_LABELS = ("center", "q1", "q2", "q3")
_SUPPORTED_SPINS = (0.5, 1.5)


@dataclass(frozen=True)
class SpinOperators:
    """Angular-momentum matrices of a single spin ``s`` (hbar = 1)."""

    s: float
    Sx: np.ndarray
    Sy: np.ndarray
    Sz: np.ndarray
    Splus: np.ndarray
    Sminus: np.ndarray

    @property
    def dim(self):
        return int(round(2 * self.s)) + 1

    def component(self, axis):
        return {"x": self.Sx, "y": self.Sy, "z": self.Sz}[axis]


@dataclass(frozen=True)
class UnitOperator:
    """A dense 32x32 operator on the unit with labeled tensor slots."""

    matrix: np.ndarray
    slot_labels: tuple = field(default=SLOT_LABELS)

    def __post_init__(self):
        if self.matrix.shape != (32, 32):
            raise ValueError(f"unit operators are 32x32, got {self.matrix.shape}")

    def __matmul__(self, other):
        if isinstance(other, UnitOperator):
            return UnitOperator(self.matrix @ other.matrix, self.slot_labels)
        return self.matrix @ other

    def __add__(self, other):
        return UnitOperator(self.matrix + _as_matrix(other), self.slot_labels)

    def __sub__(self, other):
        return UnitOperator(self.matrix - _as_matrix(other), self.slot_labels)

    def __mul__(self, scalar):
        return UnitOperator(scalar * self.matrix, self.slot_labels)

    __rmul__ = __mul__

    def dag(self):
        return UnitOperator(self.matrix.conj().T, self.slot_labels)

    def is_hermitian(self, tol=1e-14):
        return bool(np.max(np.abs(self.matrix - self.matrix.conj().T)) <= tol)


def _as_matrix(op):
    return op.matrix if isinstance(op, UnitOperator) else np.asarray(op)


def spin_operators(s):
    """Return the spin matrices for spin ``s`` in the descending-m basis.

    Parameters
    ----------
    s : float
        Spin magnitude, 1/2 or 3/2.

    Returns
    -------
    SpinOperators

    Examples
    --------
    >>> spin_operators(0.5).Sz.real
    array([[ 0.5,  0. ],
           [ 0. , -0.5]])
    """
    twice = 2 * s
    if not float(twice).is_integer() or twice <= 0:
        raise ValueError(f"2s must be a positive integer, got s={s!r}")
    if float(s) not in _SUPPORTED_SPINS:
        raise ValueError(f"only s in {_SUPPORTED_SPINS} are supported, got s={s!r}")

    m = np.arange(s, -s - 1, -1, dtype=float)
    dim = len(m)
    splus = np.zeros((dim, dim), dtype=complex)
    # <m+1|S+|m> = sqrt(s(s+1) - m(m+1)); row i holds m[i] = m[i+1] + 1
    for i in range(dim - 1):
        splus[i, i + 1] = np.sqrt(s * (s + 1) - m[i + 1] * (m[i + 1] + 1))
    sminus = splus.conj().T.copy()
    sx = 0.5 * (splus + sminus)
    sy = -0.5j * (splus - sminus)
    sz = np.diag(m).astype(complex)
    return SpinOperators(float(s), sx, sy, sz, splus, sminus)


def embed(op, slot, dims=UNIT_DIMS):
    """Place ``op`` on tensor slot ``slot``, identity elsewhere.

    Returns a :class:`UnitOperator` for the standard unit dims, a plain
    array otherwise.
    """
    op = np.asarray(op)
    dims = tuple(dims)
    if not 0 <= slot < len(dims):
        raise IndexError(f"slot {slot} out of range for dims {dims}")
    if op.shape != (dims[slot], dims[slot]):
        raise ValueError(
            f"operator of shape {op.shape} does not fit slot {slot} of dimension {dims[slot]}"
        )
    factors = [np.eye(d, dtype=complex) for d in dims]
    factors[slot] = op.astype(complex)
    full = reduce(np.kron, factors)
    if dims == UNIT_DIMS:
        return UnitOperator(full)
    return full


def dicke_state(m):
    """Symmetric three-qubit state with total S^z = ``m``.

    ``m = 1/2`` gives (|uud> + |udu> + |duu>)/sqrt(3), with all amplitudes
    positive.
    """
    if m not in (1.5, 0.5, -0.5, -1.5):
        raise ValueError(f"m must be one of +-3/2, +-1/2, got {m!r}")
    n_down = int(round(1.5 - m))
    vec = np.zeros(8, dtype=complex)
    for idx in range(8):
        if bin(idx).count("1") == n_down:
            vec[idx] = 1.0
    return vec / np.linalg.norm(vec)


def unit_basis_index(m_center, qubit_bits):
    """Index of |m_center> (x) |b1 b2 b3> in the 32-dim basis."""
    m_idx = int(round(1.5 - m_center))
    b1, b2, b3 = qubit_bits
    return 8 * m_idx + 4 * b1 + 2 * b2 + b3


def total_spin(axis):
    """Total spin component (center plus the three qubits) along ``axis``."""
    big = spin_operators(1.5).component(axis)
    small = spin_operators(0.5).component(axis)
    out = embed(big, 0)
    for slot in (1, 2, 3):
        out = out + embed(small, slot)
    return out


def permute_qubits(perm):
    """32x32 permutation matrix relabeling the qubit slots by ``perm``.

    ``perm`` is a permutation of (0, 1, 2) mapping qubit k to slot perm[k].
    """
    if sorted(perm) != [0, 1, 2]:
        raise ValueError(f"not a permutation of three qubits: {perm!r}")
    P = np.zeros((32, 32))
    for m_idx in range(4):
        for bits in range(8):
            b = [(bits >> (2 - k)) & 1 for k in range(3)]
            nb = [0, 0, 0]
            for k in range(3):
                nb[perm[k]] = b[k]
            src = 8 * m_idx + 4 * b[0] + 2 * b[1] + b[2]
            dst = 8 * m_idx + 4 * nb[0] + 2 * nb[1] + nb[2]
            P[dst, src] = 1.0
    return P


def check_commutation(ops, tol=ALGEBRA_TOL):
    """Max deviation of [Sx, Sy] - i Sz and its cyclic partners."""
    sx, sy, sz = ops.Sx, ops.Sy, ops.Sz
    devs = [
        np.max(np.abs(sx @ sy - sy @ sx - 1j * sz)),
        np.max(np.abs(sy @ sz - sz @ sy - 1j * sx)),
        np.max(np.abs(sz @ sx - sx @ sz - 1j * sy)),
    ]
    return max(devs) < tol, max(devs)
