import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

# acceptance results collected for the terminal summary
ACCEPTANCE = {}


def ref_spin(s):
    """Spin matrices from the ladder formula, written independently of the package."""
    m = np.arange(s, -s - 1, -1)
    n = len(m)
    Sp = np.zeros((n, n), dtype=complex)
    for i in range(1, n):
        Sp[i - 1, i] = np.sqrt((s - m[i]) * (s + m[i] + 1))
    Sm = Sp.conj().T
    return (Sp + Sm) / 2, (Sp - Sm) / 2j, np.diag(m).astype(complex)


def ref_hamiltonian(zz=1.0, dz=0.0):
    """32x32 unit Hamiltonian assembled with explicit Kronecker products."""
    S = ref_spin(1.5)
    s = ref_spin(0.5)
    I2 = np.eye(2)
    on_q = [
        lambda op: np.kron(np.kron(op, I2), I2),
        lambda op: np.kron(np.kron(I2, op), I2),
        lambda op: np.kron(np.kron(I2, I2), op),
    ]
    H = np.zeros((32, 32), dtype=complex)
    for place in on_q:
        for k, w in zip(range(3), (1.0, 1.0, zz)):
            H += w * np.kron(S[k], place(s[k]))
    H -= dz * np.kron(S[2] @ S[2], np.eye(8))
    return H


@pytest.fixture
def ghz16():
    v = np.zeros(16, dtype=complex)
    v[0] = v[15] = 1 / np.sqrt(2)
    return v


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
