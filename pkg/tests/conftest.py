"""Shared fixtures and independent dense oracles.

The oracles here build matrices by explicit Kronecker products, deliberately
avoiding the package's permutation-based dense assembly so that symbolic and
dense routes stay independent checks of each other.
"""

import numpy as np
import pytest

I2 = np.eye(2, dtype=complex)
PAULI = {
    "I": I2,
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def op_on(letter: str, qubit: int, n: int) -> np.ndarray:
    """Single-qubit operator embedded in an n-qubit register (little endian)."""
    m = np.eye(1, dtype=complex)
    for q in range(n - 1, -1, -1):
        m = np.kron(m, PAULI[letter] if q == qubit else I2)
    return m


def kron_string(letters: dict[int, str], n: int) -> np.ndarray:
    """Dense matrix of a Pauli string via Kronecker products."""
    m = np.eye(1, dtype=complex)
    for q in range(n - 1, -1, -1):
        m = np.kron(m, PAULI[letters.get(q, "I")])
    return m


def kron_sum(terms, n: int) -> np.ndarray:
    """Dense matrix of a list of (coefficient, {site: letter}) terms."""
    m = np.zeros((2**n, 2**n), dtype=complex)
    for coeff, letters in terms:
        m += coeff * kron_string(letters, n)
    return m


def pauli_sum_dense_oracle(s, n: int | None = None) -> np.ndarray:
    """Dense matrix of a PauliSum, built independently of PauliSum.dense()."""
    n = n or s.n_qubits
    return kron_sum([(t.coefficient, dict(t.letters)) for t in s], n)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
