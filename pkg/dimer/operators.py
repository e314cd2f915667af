"""Qubit and photon operator algebra.

Single-qubit basis is (|↑⟩, |↓⟩); two-qubit product states are ordered
|↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩ with qubit 1 leftmost in every Kronecker
product."""

import enum
import math

import numpy as np
from scipy import sparse


class QubitState(enum.IntEnum):
    TMINUS = 0
    T0 = 1
    S = 2
    TPLUS = 3

    @property
    def label(self):
        return _LABELS[self]


_LABELS = {
    QubitState.TMINUS: "Tminus",
    QubitState.T0: "T0",
    QubitState.S: "S",
    QubitState.TPLUS: "Tplus",
}

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
SIGMA_MINUS = np.array([[0, 0], [1, 0]], dtype=complex)
SIGMA_PLUS = SIGMA_MINUS.T.copy()

_S = 1 / math.sqrt(2)

# columns are |T_-⟩, |T_0⟩, |S⟩, |T_+⟩ written in the product basis
SINGLET_TRIPLET = np.array([
    [0, 0, 0, 1],
    [0, _S, _S, 0],
    [0, _S, -_S, 0],
    [1, 0, 0, 0],
], dtype=complex)


def on_qubit(op, site):
    """Embed a single-qubit operator on qubit site (1 or 2)."""
    if site == 1:
        return np.kron(op, np.eye(2))
    if site == 2:
        return np.kron(np.eye(2), op)
    raise ValueError("qubit site must be 1 or 2, got %r" % site)


def to_singlet_triplet(op):
    """Rewrite a two-qubit product-basis operator in the ordered
    {T_-, T_0, S, T_+} basis."""
    u = SINGLET_TRIPLET
    return u.conj().T @ op @ u


def bare_state(state):
    v = np.zeros(4, dtype=complex)
    v[QubitState(state)] = 1
    return v


def destroy(n_max):
    """Bosonic annihilation operator on Fock states 0..n_max (CSR)."""
    n = np.arange(1, n_max + 1)
    return sparse.diags(np.sqrt(n), 1, shape=(n_max + 1, n_max + 1),
                        format="csr", dtype=complex)


def embed(ops, dims):
    """Sparse Kronecker product of one operator per subsystem; a None
    entry stands for the identity of that subsystem."""
    out = None
    for op, dim in zip(ops, dims):
        if op is None:
            op = sparse.identity(dim, dtype=complex, format="csr")
        else:
            op = sparse.csr_matrix(op)
        out = op if out is None else sparse.kron(out, op, format="csr")
    return out
