"""Boolean functions, oracles and the ancilla-free Deutsch-Jozsa run."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from itertools import combinations
from typing import NamedTuple

import numpy as np

from .qcore import I2, SIGMA_Z, apply, basis_state, hadamard_n, kron_all

MAX_BITS = 3


class Classification(enum.Enum):
    CONSTANT = "Constant"
    BALANCED = "Balanced"
    NEITHER = "Neither"


class NeitherError(ValueError):
    """Raised when a function is neither constant nor balanced."""


@dataclass(frozen=True)
class BooleanFunction:
    """Truth table of f: {0,1}^n -> {0,1}; ``table[x] == f(x)``."""

    n_bits: int
    table: tuple

    def __post_init__(self):
        if not 1 <= self.n_bits <= MAX_BITS + 1:
            raise ValueError(f"n_bits must be in 1..{MAX_BITS + 1}, got {self.n_bits}")
        table = tuple(int(b) for b in self.table)
        if len(table) != 1 << self.n_bits:
            raise ValueError(
                f"truth table has {len(table)} entries, expected {1 << self.n_bits}"
            )
        if any(b not in (0, 1) for b in table):
            raise ValueError("truth table entries must be 0 or 1")
        object.__setattr__(self, "table", table)

    @classmethod
    def from_key(cls, n_bits: int, key: int) -> "BooleanFunction":
        """Build from the big-endian truth-table integer (``f(0)`` is the MSB)."""
        size = 1 << n_bits
        if not 0 <= key < 1 << size:
            raise ValueError(f"truth-table key {key} out of range for n={n_bits}")
        return cls(n_bits, tuple((key >> (size - 1 - x)) & 1 for x in range(size)))

    @classmethod
    def from_callable(cls, n_bits: int, fn) -> "BooleanFunction":
        """Tabulate ``fn(x1, ..., xn)`` with qubit 1 as the most significant bit."""
        return cls(n_bits, tuple(int(fn(*bits_of(x, n_bits))) & 1 for x in range(1 << n_bits)))

    @property
    def key(self) -> int:
        k = 0
        for b in self.table:
            k = (k << 1) | b
        return k

    @property
    def bitstring(self) -> str:
        return "".join(str(b) for b in self.table)

    def __call__(self, x: int) -> int:
        return self.table[x]

    def complement(self) -> "BooleanFunction":
        return BooleanFunction(self.n_bits, tuple(1 - b for b in self.table))


@dataclass(frozen=True)
class PhaseOracle:
    """Diagonal +-1 unitary; ``signs[x] == (-1)**f(x)``."""

    n_qubits: int
    signs: tuple

    def __post_init__(self):
        signs = tuple(int(s) for s in self.signs)
        if len(signs) != 1 << self.n_qubits:
            raise ValueError("sign vector length must be 2**n_qubits")
        if any(s not in (1, -1) for s in signs):
            raise ValueError("phase oracle entries must be +1 or -1")
        object.__setattr__(self, "signs", signs)

    @property
    def matrix(self) -> np.ndarray:
        return np.diag(np.array(self.signs, dtype=complex))

    def negated(self) -> "PhaseOracle":
        return PhaseOracle(self.n_qubits, tuple(-s for s in self.signs))

    def function(self) -> BooleanFunction:
        """The function whose oracle this is (global sign read as a constant term)."""
        return BooleanFunction(self.n_qubits, tuple((1 - s) // 2 for s in self.signs))


class Verdict(NamedTuple):
    kind: Classification
    zero_state_amplitude: complex


@dataclass(frozen=True)
class CanonicalOperator:
    """One of the named operators U1..U9 listed for n = 1, 2, 3.

    ``global_sign`` is -1 for the operators listed as negatives of another
    one (``U_i = -U_{i-4}`` for two bits, ``-I`` and ``-sigma_z`` for one bit).
    """

    name: str
    label: Classification
    oracle: PhaseOracle
    global_sign: int = 1

    @property
    def function(self) -> BooleanFunction:
        return self.oracle.function()


def bits_of(x: int, n: int) -> tuple:
    """Bits ``(x1, ..., xn)`` of basis index ``x``, qubit 1 first."""
    return tuple((x >> (n - 1 - k)) & 1 for k in range(n))


def classify(f: BooleanFunction) -> Classification:
    ones = sum(f.table)
    size = len(f.table)
    if ones in (0, size):
        return Classification.CONSTANT
    if 2 * ones == size:
        return Classification.BALANCED
    return Classification.NEITHER


def require_promise(f: BooleanFunction) -> Classification:
    kind = classify(f)
    if kind is Classification.NEITHER:
        raise NeitherError(
            f"function {f.bitstring} is neither constant nor balanced"
        )
    return kind


def enumerate_functions(n: int) -> list:
    """All constant and balanced functions on n bits, ordered by truth-table key."""
    if not 1 <= n <= MAX_BITS:
        raise ValueError(f"n must be in 1..{MAX_BITS}, got {n}")
    size = 1 << n
    keys = {0, (1 << size) - 1}
    for ones in combinations(range(size), size // 2):
        keys.add(sum(1 << (size - 1 - x) for x in ones))
    return [BooleanFunction.from_key(n, k) for k in sorted(keys)]


def build_phase_oracle(f: BooleanFunction) -> PhaseOracle:
    require_promise(f)
    return PhaseOracle(f.n_bits, tuple(1 - 2 * b for b in f.table))


def build_ancilla_oracle(f: BooleanFunction) -> np.ndarray:
    """Permutation |x>|y> -> |x>|y xor f(x)> with the ancilla least significant."""
    require_promise(f)
    if f.n_bits + 1 > 4:
        raise ValueError("ancilla oracle needs n + 1 <= 4 qubits")
    dim = 1 << (f.n_bits + 1)
    u = np.zeros((dim, dim), dtype=complex)
    for x in range(1 << f.n_bits):
        for y in (0, 1):
            u[(x << 1) | (y ^ f(x)), (x << 1) | y] = 1.0
    return u


def algebraic_normal_form(f: BooleanFunction) -> list:
    """Monomials of the ANF as sorted tuples of 1-based qubit indices.

    The empty tuple is the constant term.
    """
    n = f.n_bits
    coeffs = list(f.table)
    # Moebius transform over subsets encoded like the basis index
    for k in range(n):
        bit = 1 << k
        for x in range(1 << n):
            if x & bit:
                coeffs[x] ^= coeffs[x ^ bit]
    monomials = []
    for m, c in enumerate(coeffs):
        if c:
            monomials.append(tuple(q + 1 for q in range(n) if bits_of(m, n)[q]))
    return sorted(monomials, key=lambda t: (len(t), t))


def anf_degree(f: BooleanFunction) -> int:
    return max((len(m) for m in algebraic_normal_form(f)), default=0)


def run_dj(f: BooleanFunction):
    """Run H^n . U_f . H^n on |0...0> and read the verdict off the |0...0> amplitude."""
    require_promise(f)
    n = f.n_bits
    h = hadamard_n(n)
    psi = apply(h, basis_state(0, n))
    psi = apply(build_phase_oracle(f).matrix, psi)
    final = apply(h, psi)
    amp = complex(final[0])
    kind = Classification.CONSTANT if abs(amp) > 0.5 else Classification.BALANCED
    return final, Verdict(kind, amp)


def _z_string(n: int, *qubits: int) -> np.ndarray:
    return kron_all([SIGMA_Z if k in qubits else I2 for k in range(1, n + 1)])


def _as_oracle(matrix: np.ndarray) -> PhaseOracle:
    diag = np.diag(matrix)
    if np.max(np.abs(matrix - np.diag(diag))) > 1e-12:
        raise AssertionError("canonical operator is not diagonal")
    signs = np.rint(diag.real).astype(int)
    if np.max(np.abs(diag - signs)) > 1e-12:
        raise AssertionError("canonical operator has entries other than +-1")
    return PhaseOracle(int(np.log2(len(diag))), tuple(signs))


def canonical_operators(n: int) -> list:
    """The named operators, evaluated from their I / sigma_z expressions."""
    C, B = Classification.CONSTANT, Classification.BALANCED
    if n == 1:
        one, z = _z_string(1), _z_string(1, 1)
        rows = [("U1", C, one, 1), ("U2", C, -one, -1), ("U3", B, z, 1), ("U4", B, -z, -1)]
    elif n == 2:
        base = [
            ("U1", C, _z_string(2)),
            ("U2", B, _z_string(2, 1)),
            ("U3", B, _z_string(2, 2)),
            ("U4", B, _z_string(2, 1, 2)),
        ]
        rows = [(name, lab, m, 1) for name, lab, m in base]
        rows += [(f"U{i + 5}", lab, -m, -1) for i, (_, lab, m) in enumerate(base)]
    elif n == 3:
        z = lambda *q: _z_string(3, *q)  # noqa: E731
        e = z()
        rows = [
            ("U1", C, e, 1),
            ("U2", B, z(1), 1),
            ("U3", B, z(3), 1),
            ("U4", B, z(1, 2), 1),
            ("U5", B, z(1, 2, 3), 1),
            ("U6", B, 0.5 * z(1) @ (e + z(2) + z(3) - z(2, 3)), 1),
            ("U7", B, 0.5 * z(2) @ (e + z(1) + z(3) - z(1, 3)), 1),
            ("U8", B, 0.5 * z(3) @ (e + z(1) + z(2) - z(1, 2)), 1),
            ("U9", B, 0.5 * (z(1) + z(3) - z(1, 2) + z(2, 3)), 1),
        ]
    else:
        raise ValueError(f"canonical operators exist for n in 1..3, got {n}")
    return [CanonicalOperator(name, lab, _as_oracle(m), g) for name, lab, m, g in rows]


def canonical_operator(n: int, name: str) -> CanonicalOperator:
    for op in canonical_operators(n):
        if op.name.lower() == name.lower():
            return op
    raise KeyError(f"no canonical operator {name!r} for n={n}")


def resolve_function(n: int, spec: str) -> BooleanFunction:
    """Resolve a CLI-style function reference: ``U6`` or a truth-table integer."""
    spec = spec.strip()
    if spec[:1] in ("U", "u"):
        return canonical_operator(n, spec).function
    try:
        key = int(spec, 0)
    except ValueError:
        raise ValueError(f"cannot parse function reference {spec!r}") from None
    return BooleanFunction.from_key(n, key)
