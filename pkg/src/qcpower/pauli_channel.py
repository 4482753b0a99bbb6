"""Stabilizer twirl of the noisy GHZ state and its Pauli error classes.

Qubit 0 is the encoded center, qubits 1-3 the virtual qubits. A -1 eigenvalue
of X0X1X2X3 is attributed to Z0, a -1 eigenvalue of Z0Zi to Xi, and X1X2X3
is written as X0.
"""

import csv
import io
from dataclasses import dataclass, field
from functools import lru_cache, reduce

import numpy as np

from .ghz_distill import GHZ

__all__ = [
    "PAULI_CLASSES",
    "StabilizerGroup",
    "PauliErrorDistribution",
    "BasisCoverageError",
    "pauli_string",
    "stabilizer_group",
    "class_states",
    "twirl",
    "extract_error_probs",
    "format_report",
    "report_csv",
    "gram_error",
    "offdiagonal_weight",
]

_I = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)

# report-ordered class labels (X-type error paired with its Z0 partner); each is a product of Z0 and X's on qubits 0..3
PAULI_CLASSES = (
    "I", "Z0",
    "X1", "Z0X1",
    "X2", "Z0X2",
    "X3", "Z0X3",
    "X1X2", "Z0X1X2",
    "X2X3", "Z0X2X3",
    "X1X3", "Z0X1X3",
    "X0", "Z0X0",
)


class BasisCoverageError(RuntimeError):
    """Class probabilities do not account for the whole state."""


def pauli_string(label, n=4):
    """Matrix of a product such as ``"Z0X1X2"`` on ``n`` qubits, qubit 0 leftmost.

    Factors act right to left, so ``"Z0X0"`` is Z0 @ X0.
    """
    factors = [_I] * n
    if label != "I":
        tokens = [label[i:i + 2] for i in range(0, len(label), 2)]
        for tok in reversed(tokens):
            kind, qubit = tok[0], int(tok[1])
            op = {"X": _X, "Z": _Z}[kind]
            factors[qubit] = op @ factors[qubit]
    return reduce(np.kron, factors)


@dataclass(frozen=True)
class StabilizerGroup:
    generators: tuple
    labels: tuple = ("X0X1X2X3", "Z0Z1", "Z0Z2", "Z0Z3")


@lru_cache(maxsize=None)
def stabilizer_group():
    gens = tuple(pauli_string(lbl) for lbl in ("X0X1X2X3", "Z0Z1", "Z0Z2", "Z0Z3"))
    for g in gens:
        g.setflags(write=False)
    return StabilizerGroup(gens)


@lru_cache(maxsize=None)
def class_states():
    """16x16 matrix whose columns are sigma|GHZ> in :data:`PAULI_CLASSES` order."""
    cols = np.stack([pauli_string(lbl) @ GHZ for lbl in PAULI_CLASSES], axis=1)
    cols.setflags(write=False)
    return cols


@dataclass
class PauliErrorDistribution:
    probs: dict
    p_s: float = 1.0
    meta: dict = field(default_factory=dict)

    def __getitem__(self, label):
        return self.probs[label]

    @property
    def total(self):
        return float(sum(self.probs.values()))

    @property
    def error_weight(self):
        return float(sum(v for k, v in self.probs.items() if k != "I"))

    def as_array(self):
        return np.array([self.probs[k] for k in PAULI_CLASSES])

    @classmethod
    def from_mapping(cls, mapping, p_s=1.0):
        probs = {k: float(mapping.get(k, 0.0)) for k in PAULI_CLASSES}
        unknown = set(mapping) - set(PAULI_CLASSES)
        if unknown:
            raise KeyError(f"unknown Pauli classes: {sorted(unknown)}")
        return cls(probs=probs, p_s=p_s)


def twirl(rho16):
    """Average over the stabilizer group: prod_K (rho + K rho K)/2."""
    out = np.asarray(rho16, dtype=complex)
    for K in stabilizer_group().generators:
        out = 0.5 * (out + K @ out @ K.conj().T)
    return out


def extract_error_probs(rho_twirled, p_s=1.0, tol=1e-8):
    """Pauli class probabilities <GHZ|sigma rho sigma|GHZ> of a twirled state."""
    B = class_states()
    diag = np.real(np.einsum("ia,ij,ja->a", B.conj(), rho_twirled, B))
    total = float(diag.sum())
    if total < 1.0 - tol:
        raise BasisCoverageError(f"class probabilities sum to {total:.12g}")
    probs = {lbl: float(p) for lbl, p in zip(PAULI_CLASSES, diag)}
    return PauliErrorDistribution(probs=probs, p_s=p_s)


def _display(label, p):
    if label == "I":
        return f"{p:.4f}"
    return f"{p:.2e}"


def format_report(dist):
    """Human-readable two-column report, one row per class in report order.

    The identity row uses four decimals, error rows three significant
    figures.
    """
    lines = ["class,probability"]
    lines += [f"{lbl},{_display(lbl, dist.probs[lbl])}" for lbl in PAULI_CLASSES]
    return "\n".join(lines) + "\n"


def report_csv(dist):
    """Full-precision CSV of the class probabilities."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["class", "probability"])
    for lbl in PAULI_CLASSES:
        w.writerow([lbl, repr(dist.probs[lbl])])
    return buf.getvalue()


def gram_error():
    """Deviation of the sigma|GHZ> Gram matrix from the identity."""
    B = class_states()
    return float(np.max(np.abs(B.conj().T @ B - np.eye(16))))


def offdiagonal_weight(rho):
    """Largest off-diagonal element of ``rho`` in the sigma|GHZ> basis."""
    B = class_states()
    m = B.conj().T @ rho @ B
    return float(np.max(np.abs(m - np.diag(np.diag(m)))))

