"""From GHZ-level Pauli errors to cluster-state error rates.

One logical cluster qubit C is built from two GHZ units, 0-3 and 0'-3'.
Virtual qubits 1 and 1' are Bell-measured to merge the two GHZ states, the
center 0 is measured in the X basis to shrink the result, and qubits 2, 3,
2', 3' are measured jointly with a partner qubit of the neighbors U, L, D, R
to enact CZ gates. The surviving center 0' is the cluster qubit C.

:func:`simulate_block_protocol` runs that procedure on a state vector for
every measurement record and reports the residual Pauli frame as a Z
pattern on {C, U, L, D, R}; on the star-graph fragment every Pauli reduces
to a unique Z pattern through the stabilizers X_v Z_N(v).
"""

import re
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product

import numpy as np

__all__ = [
    "CLUSTER_QUBITS",
    "ClusterErrorRates",
    "PropagationRule",
    "ProtocolResult",
    "ProtocolError",
    "VerificationReport",
    "propagation_table",
    "correlated_rules",
    "phase_error_rate",
    "loss_rate",
    "cluster_error_rates",
    "canonical_pattern",
    "pattern_label",
    "equivalent",
    "simulate_block_protocol",
    "verify_propagation_oracle",
]

CLUSTER_QUBITS = ("C", "U", "L", "D", "R")
# star graph: C is joined to every neighbor
_NEIGHBORS = {"C": ("U", "L", "D", "R"), "U": ("C",), "L": ("C",), "D": ("C",), "R": ("C",)}
# virtual qubit used for the CZ toward each neighbor
_BOND_QUBIT = {"U": "2", "L": "3", "D": "2'", "R": "3'"}

_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.diag([1.0, -1.0]).astype(complex)
_PAULI = {"X": _X, "Y": _Y, "Z": _Z}

_TOKEN = re.compile(r"([XYZ])(\d'?|[A-Z])")


class ProtocolError(RuntimeError):
    """Measurement branches disagree or leave a state outside the graph basis."""


# --- Pauli bookkeeping on the cluster fragment -------------------------------

def _tokens(label):
    if label in ("", "I"):
        return []
    tokens = _TOKEN.findall(label)
    if "".join(k + q for k, q in tokens) != label:
        raise ValueError(f"cannot parse Pauli label {label!r}")
    return tokens


def canonical_pattern(label):
    """Z pattern (frozenset of cluster qubits) equivalent to a Pauli on the fragment.

    X_v is traded for Z on the neighbors of v, Y_v for Z_v and Z on the
    neighbors; phases are dropped.
    """
    pattern = set()
    for kind, q in _tokens(label):
        if q not in CLUSTER_QUBITS:
            raise ValueError(f"{q!r} is not a cluster qubit")
        flips = []
        if kind in ("X", "Y"):
            flips.extend(_NEIGHBORS[q])
        if kind in ("Z", "Y"):
            flips.append(q)
        pattern.symmetric_difference_update(flips)
    return frozenset(pattern)


def pattern_label(pattern):
    if not pattern:
        return "I"
    return "".join("Z" + q for q in CLUSTER_QUBITS if q in pattern)


def equivalent(p, q):
    """True if two Pauli labels on {C, U, L, D, R} act identically on the fragment."""
    return canonical_pattern(p) == canonical_pattern(q)


# --- the propagation table ---------------------------------------------------

@dataclass(frozen=True)
class PropagationRule:
    sources: tuple
    target: str

    @property
    def pattern(self):
        return canonical_pattern(self.target)

    @property
    def weight(self):
        return len(self.pattern)


def propagation_table():
    """The eight single-qubit rules for block C."""
    return [
        PropagationRule(("X0",), "I"),
        PropagationRule(("X0'",), "XC"),
        PropagationRule(("X1", "X1'"), "ZUZL"),
        PropagationRule(("X2",), "ZU"),
        PropagationRule(("X2'",), "ZD"),
        PropagationRule(("X3",), "ZL"),
        PropagationRule(("X3'",), "ZR"),
        PropagationRule(("Z0", "Z1", "Z2", "Z3", "Z0'", "Z1'", "Z2'", "Z3'"), "ZC"),
    ]


def correlated_rules():
    """Propagation of the Z0Xi classes of each unit."""
    return [
        PropagationRule(("Z0X1", "Z0'X1'"), "ZCZUZL"),
        PropagationRule(("Z0X2",), "ZCZU"),
        PropagationRule(("Z0X3",), "ZCZL"),
        PropagationRule(("Z0'X2'",), "ZCZD"),
        PropagationRule(("Z0'X3'",), "ZCZR"),
    ]


# --- error rates -------------------------------------------------------------

# weight of the cluster pattern each GHZ class propagates to
_PZ_WEIGHTS = {
    "Z0": 1, "X1": 2, "X2": 1, "X3": 1,
    "Z0X1": 3, "Z0X2": 2, "Z0X3": 2,
}


@dataclass(frozen=True)
class ClusterErrorRates:
    p_z: float
    p_l: float
    correlated: list = field(default_factory=list)


def phase_error_rate(dist):
    """p_z = 2 (p_Z0 + 2 p_X1 + p_X2 + p_X3 + 3 p_Z0X1 + 2 p_Z0X2 + 2 p_Z0X3).

    The factor 2 counts the two units per cluster qubit. Classes outside
    the sum (X1X2, X0, ...) are neglected.
    """
    probs = dist.probs if hasattr(dist, "probs") else dist
    return 2.0 * sum(w * probs[k] for k, w in _PZ_WEIGHTS.items())


def loss_rate(p_s):
    """A cluster qubit is missing when either of its two units fails: 1 - p_s^2."""
    if not 0.0 <= p_s <= 1.0:
        raise ValueError(f"p_s must be a probability, got {p_s}")
    return 1.0 - p_s * p_s


def cluster_error_rates(dist):
    p = dist.probs
    correlated = [
        ("ZZ on qubits sharing a neighbor", 2.0 * p["X1"]),
        ("ZZ on adjacent qubits (Z0X2)", 2.0 * p["Z0X2"]),
        ("ZZ on adjacent qubits (Z0X3)", 2.0 * p["Z0X3"]),
        ("ZZZ on connected trimers", 2.0 * p["Z0X1"]),
    ]
    return ClusterErrorRates(p_z=phase_error_rate(dist), p_l=loss_rate(dist.p_s), correlated=correlated)


# --- state-vector protocol oracle --------------------------------------------

class _Register:
    """State vector over named qubits, one tensor axis per qubit."""

    def __init__(self, labels, psi):
        self.labels = list(labels)
        self.psi = np.asarray(psi, dtype=complex).reshape((2,) * len(self.labels))

    def copy(self):
        return _Register(self.labels, self.psi.copy())

    def add(self, labels, vec):
        vec = np.asarray(vec, dtype=complex).reshape((2,) * len(labels))
        return _Register(self.labels + list(labels), np.multiply.outer(self.psi, vec))

    def apply1(self, op, q):
        ax = self.labels.index(q)
        psi = np.tensordot(op, self.psi, axes=([1], [ax]))
        self.psi = np.moveaxis(psi, 0, ax)

    def project(self, qubits, vec):
        """Contract ``qubits`` with <vec|; returns (probability, unnormalized register)."""
        axes = [self.labels.index(q) for q in qubits]
        bra = np.asarray(vec, dtype=complex).conj().reshape((2,) * len(qubits))
        psi = np.tensordot(self.psi, bra, axes=(axes, list(range(len(qubits)))))
        rest = [q for q in self.labels if q not in qubits]
        prob = float(np.vdot(psi, psi).real)
        return prob, _Register(rest, psi)

    def normalized(self):
        n = np.sqrt(np.vdot(self.psi, self.psi).real)
        return _Register(self.labels, self.psi / n)

    def vector(self, order):
        axes = [self.labels.index(q) for q in order]
        return np.transpose(self.psi, axes).reshape(-1)


def _ghz(n):
    v = np.zeros(2 ** n, dtype=complex)
    v[0] = v[-1] = 1.0 / np.sqrt(2.0)
    return v


_s = 1.0 / np.sqrt(2.0)
_BELL = (
    np.array([_s, 0, 0, _s]),
    np.array([_s, 0, 0, -_s]),
    np.array([0, _s, _s, 0]),
    np.array([0, _s, -_s, 0]),
)
_XBASIS = (np.array([_s, _s]), np.array([_s, -_s]))
_CZ = np.diag([1.0, 1.0, 1.0, -1.0])
_CZ_BASIS = tuple(_CZ @ np.kron(u, v) for u, v in product(_XBASIS, _XBASIS))


@lru_cache(maxsize=None)
def _graph_basis():
    """32 x 32 matrix of Z_S|G> for the star graph, columns indexed by S bitmask."""
    n = len(CLUSTER_QUBITS)
    plus = np.full(2 ** n, 2 ** (-n / 2), dtype=complex)
    bits = (np.arange(2 ** n)[:, None] >> (n - 1 - np.arange(n))) & 1
    center = bits[:, 0]
    sign = np.prod(np.where((center[:, None] & bits[:, 1:]) == 1, -1.0, 1.0), axis=1)
    graph = plus * sign
    cols = []
    for mask in range(2 ** n):
        sel = (mask >> (n - 1 - np.arange(n))) & 1
        zsign = np.prod(np.where((bits & sel) == 1, -1.0, 1.0), axis=1)
        cols.append(graph * zsign)
    B = np.stack(cols, axis=1)
    B.setflags(write=False)
    return B


def _mask_to_pattern(mask):
    n = len(CLUSTER_QUBITS)
    return frozenset(q for k, q in enumerate(CLUSTER_QUBITS) if (mask >> (n - 1 - k)) & 1)


def _identify(vec, tol=1e-10):
    """Z pattern S with Z_S|G> matching ``vec``, plus the fidelity."""
    overlaps = np.abs(_graph_basis().conj().T @ vec) ** 2
    best = int(np.argmax(overlaps))
    if overlaps[best] < 1.0 - tol:
        raise ProtocolError(f"output is not a graph-basis state (max overlap {overlaps[best]:.6f})")
    return _mask_to_pattern(best), float(overlaps[best])


def _parse_injection(injected):
    if isinstance(injected, str):
        injected = [injected] if injected else []
    ops = []
    for label in injected:
        for kind, q in _tokens(label):
            if not re.fullmatch(r"[0-3]'?", q):
                raise ValueError(f"{label!r} must act on unit qubits 0-3 or 0'-3'")
            ops.append((kind, q))
    return ops


def _leaves(injected, min_prob=1e-12):
    """Yield (record, normalized five-qubit state) for every nonzero branch."""
    a = ["0", "1", "2", "3"]
    b = ["0'", "1'", "2'", "3'"]
    reg = _Register(a, _ghz(4)).add(b, _ghz(4))
    for kind, q in reversed(_parse_injection(injected)):
        reg.apply1(_PAULI[kind], q)

    stages = [("merge", ["1", "1'"], _BELL, None), ("shrink", ["0"], _XBASIS, None)]
    for nb in ("U", "L", "D", "R"):
        stages.append(("cz-" + nb, [_BOND_QUBIT[nb], "w" + nb], _CZ_BASIS, nb))

    def walk(reg, k, record, prob):
        if k == len(stages):
            out = reg.normalized().vector(["0'", "U", "L", "D", "R"])
            yield tuple(record), prob, out
            return
        _, qubits, basis, neighbor = stages[k]
        if neighbor is not None:
            # neighbor logical |+> carried by (N, partner) in a two-qubit GHZ
            reg = reg.add([neighbor, "w" + neighbor], _ghz(2))
        for outcome, vec in enumerate(basis):
            p, sub = reg.project(qubits, vec)
            if p < min_prob:
                continue
            yield from walk(sub.normalized(), k + 1, record + [outcome], prob * p)

    yield from walk(reg, 0, [], 1.0)


@lru_cache(maxsize=1)
def _ideal_frames():
    frames = {}
    for record, prob, vec in _leaves(()):
        pattern, fid = _identify(vec)
        frames[record] = (pattern, fid)
    return frames


@dataclass(frozen=True)
class ProtocolResult:
    pattern: frozenset
    branches: int
    min_fidelity: float

    @property
    def label(self):
        return pattern_label(self.pattern)


def simulate_block_protocol(injected_error=()):
    """Run merge, shrink and four CZ measurements with ``injected_error`` applied first.

    Parameters
    ----------
    injected_error : str or sequence of str
        Pauli on the unit qubits, e.g. ``"X2"``, ``"Z1'"`` or ``"Z0X1"``.
        Empty for the error-free run.

    Returns
    -------
    ProtocolResult
        Residual Z pattern after the byproduct correction of each record.

    Raises
    ------
    ProtocolError
        If two measurement records leave different residual frames.
    """
    ideal = _ideal_frames()
    residual = None
    count = 0
    min_fid = 1.0
    for record, prob, vec in _leaves(injected_error):
        if record not in ideal:
            raise ProtocolError(f"record {record} never occurs without errors")
        pattern, fid = _identify(vec)
        frame = pattern ^ ideal[record][0]
        if residual is None:
            residual = frame
        elif frame != residual:
            raise ProtocolError(
                f"branch {record} leaves {pattern_label(frame)}, "
                f"others leave {pattern_label(residual)}"
            )
        count += 1
        min_fid = min(min_fid, fid)
    return ProtocolResult(pattern=residual, branches=count, min_fidelity=min_fid)


@dataclass
class VerificationReport:
    rows: list

    @property
    def passed(self):
        return all(r["ok"] for r in self.rows if r["kind"] == "table")

    @property
    def n_verified(self):
        return sum(r["ok"] for r in self.rows if r["kind"] == "table")

    @property
    def n_rules(self):
        return sum(r["kind"] == "table" for r in self.rows)

    def summary(self):
        return f"{self.n_verified}/{self.n_rules} rules verified"

    def format(self):
        lines = []
        for r in self.rows:
            status = "PASS" if r["ok"] else "FAIL"
            lines.append(
                f"{status} {r['kind']:<10} {' or '.join(r['sources']):<36} -> "
                f"{r['target']:<8} observed {r['observed']:<10} branches {r['branches']}"
                + (f"  [{r['detail']}]" if r["detail"] else "")
            )
        lines.append(self.summary())
        return "\n".join(lines)


def verify_propagation_oracle(include_correlated=True):
    """Check every propagation rule against the state-vector protocol."""
    rows = []
    groups = [("table", propagation_table())]
    if include_correlated:
        groups.append(("correlated", correlated_rules()))
    for kind, rules in groups:
        for rule in rules:
            ok = True
            observed = set()
            branches = 0
            detail = ""
            for src in rule.sources:
                try:
                    res = simulate_block_protocol(src)
                except ProtocolError as exc:
                    ok = False
                    detail = f"{src}: {exc}"
                    continue
                branches += res.branches
                observed.add(res.label)
                if res.pattern != rule.pattern:
                    ok = False
                    detail = f"{src} gave {res.label}"
            rows.append({
                "kind": kind,
                "sources": list(rule.sources),
                "target": rule.target,
                "observed": ",".join(sorted(observed)) or "-",
                "branches": branches,
                "ok": ok,
                "detail": detail,
            })
    return VerificationReport(rows)
