"""Dense complex linear algebra for small qubit registers.

Conventions used throughout the package:

* Basis index ``x`` encodes the bit string ``x1 x2 ... xn`` with qubit 1 as
  the most significant bit, so ``|x1 x2 x3>`` reads left to right.
* ``kron(a, b)`` puts ``a`` on the more significant qubits.  Multi-factor
  products are assembled left to right: ``kron_all([a, b, c])`` is
  ``kron(kron(a, b), c)``.
* Operators and states are plain ``numpy`` arrays of dtype ``complex128``.
  Functions never modify their inputs.
"""
from __future__ import annotations

from functools import reduce
from typing import NamedTuple, Sequence

import numpy as np

MAX_QUBITS = 4
DEFAULT_TOL = 1e-9

I2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2.0)


class PhaseComparison(NamedTuple):
    equal: bool
    fidelity: float

    def __bool__(self):
        return self.equal


def _check_square(a, name="operator"):
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {a.shape}")
    dim = a.shape[0]
    if dim & (dim - 1) or dim == 0:
        raise ValueError(f"{name} dimension {dim} is not a power of two")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    return a


def n_qubits_of(a) -> int:
    """Number of qubits spanned by a vector or square matrix."""
    dim = np.asarray(a).shape[0]
    n = dim.bit_length() - 1
    if 1 << n != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    return n


def kron(a, b) -> np.ndarray:
    """Kronecker product with ``a`` on the more significant qubits."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def kron_all(factors: Sequence) -> np.ndarray:
    """Left-to-right Kronecker product of ``factors``."""
    if not factors:
        raise ValueError("kron_all needs at least one factor")
    return reduce(kron, factors)


def embed(single: np.ndarray, qubit: int, n: int) -> np.ndarray:
    """Lift a 2x2 operator onto ``qubit`` (1-based) of an ``n``-qubit register."""
    if not 1 <= qubit <= n:
        raise ValueError(f"qubit {qubit} outside 1..{n}")
    return kron_all([single if k == qubit else I2 for k in range(1, n + 1)])


def hadamard_n(n: int) -> np.ndarray:
    """Normalized n-qubit Hadamard transform, entries +-2**(-n/2)."""
    if not 1 <= n <= MAX_QUBITS:
        raise ValueError(f"n must be in 1..{MAX_QUBITS}, got {n}")
    return kron_all([HADAMARD] * n)


def basis_state(index: int, n: int) -> np.ndarray:
    if not 1 <= n <= MAX_QUBITS:
        raise ValueError(f"n must be in 1..{MAX_QUBITS}, got {n}")
    if not 0 <= index < 1 << n:
        raise ValueError(f"basis index {index} outside register of {n} qubits")
    psi = np.zeros(1 << n, dtype=complex)
    psi[index] = 1.0
    return psi


def is_unitary(u, tol: float = 1e-10) -> bool:
    u = _check_square(u)
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) <= tol)


def is_hermitian(a, tol: float = 1e-10) -> bool:
    a = _check_square(a)
    return bool(np.max(np.abs(a - a.conj().T)) <= tol)


def apply(u, psi) -> np.ndarray:
    """Return ``u @ psi`` after checking dimensions."""
    u = _check_square(u)
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1 or psi.shape[0] != u.shape[0]:
        raise ValueError(
            f"state of length {psi.shape[0]} does not match operator of dim {u.shape[0]}"
        )
    return u @ psi


def fidelity(a, b) -> float:
    """Phase-insensitive overlap ``|tr(a^dag b)| / dim``."""
    a = _check_square(a, "a")
    b = _check_square(b, "b")
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(abs(np.trace(a.conj().T @ b)) / a.shape[0])


def global_phase_equal(a, b, tol: float = DEFAULT_TOL) -> PhaseComparison:
    """Compare two unitaries while ignoring a global phase.

    Returns a ``PhaseComparison`` that is truthy when the fidelity is at
    least ``1 - tol``.
    """
    f = fidelity(a, b)
    return PhaseComparison(f >= 1.0 - tol, f)
