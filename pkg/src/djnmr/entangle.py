"""Entangling power of phase oracles via exact tensor factorization.

A phase oracle is diagonal, so it factorizes across a qubit bipartition
exactly when its sign vector, reshaped into a matrix with rows indexed by
one side and columns by the other, has rank one.  The sign entries are
+-1 integers, so the rank test is done with integer 2x2 minors and no
tolerance.
"""
from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .oracles import PhaseOracle, build_phase_oracle, enumerate_functions


class EntanglementKind(enum.Enum):
    NON_ENTANGLING = "NonEntangling"
    PARTIALLY_ENTANGLING = "PartiallyEntangling"
    MAXIMALLY_ENTANGLING = "MaximallyEntangling"


@dataclass(frozen=True)
class QubitPartition:
    blocks: tuple

    def __post_init__(self):
        blocks = tuple(tuple(sorted(b)) for b in self.blocks)
        if any(not b for b in blocks):
            raise ValueError("partition blocks must be nonempty")
        flat = [q for b in blocks for q in b]
        if len(flat) != len(set(flat)):
            raise ValueError("partition blocks overlap")
        object.__setattr__(self, "blocks", tuple(sorted(blocks)))

    @property
    def n_qubits(self) -> int:
        return sum(len(b) for b in self.blocks)

    def __str__(self):
        return "".join("{" + ",".join(map(str, b)) + "}" for b in self.blocks)


@dataclass(frozen=True)
class EntanglementClass:
    kind: EntanglementKind
    finest_partition: QubitPartition


def _sign_tensor(oracle: PhaseOracle) -> np.ndarray:
    return np.array(oracle.signs, dtype=np.int64).reshape((2,) * oracle.n_qubits)


def _matricize(tensor: np.ndarray, rows) -> np.ndarray:
    """Reshape so that the axes in ``rows`` (0-based) index matrix rows."""
    cols = [a for a in range(tensor.ndim) if a not in rows]
    m = np.transpose(tensor, list(rows) + cols)
    return m.reshape(1 << len(rows), -1)


def _is_rank_one(m: np.ndarray) -> bool:
    # M[a,c] M[b,d] == M[a,d] M[b,c] for every pair of rows and columns
    lhs = np.einsum("ac,bd->abcd", m, m)
    rhs = np.einsum("ad,bc->abcd", m, m)
    return bool(np.array_equal(lhs, rhs))


def _validate_subset(subset, n):
    s = sorted(set(subset))
    if len(s) != len(list(subset)):
        raise ValueError(f"duplicate qubits in subset {subset}")
    if not s or len(s) >= n:
        raise ValueError(f"subset {subset} must be a nonempty proper subset of 1..{n}")
    if s[0] < 1 or s[-1] > n:
        raise ValueError(f"subset {subset} has qubits outside 1..{n}")
    return s


def factorizes_over(oracle: PhaseOracle, subset) -> bool:
    """Whether the oracle is a tensor product across ``subset`` | rest (1-based)."""
    s = _validate_subset(subset, oracle.n_qubits)
    return _is_rank_one(_matricize(_sign_tensor(oracle), [q - 1 for q in s]))


def _split(tensor: np.ndarray, labels: tuple) -> list:
    """Recursively split a sign tensor over ``labels`` into indivisible blocks."""
    k = len(labels)
    for size in range(1, k // 2 + 1):
        for rows in combinations(range(k), size):
            if size * 2 == k and 0 not in rows:
                continue
            m = _matricize(tensor, list(rows))
            if not _is_rank_one(m):
                continue
            cols = [a for a in range(k) if a not in rows]
            pivot = m[0, 0]
            left = (m[:, 0] * pivot).reshape((2,) * len(rows))
            right = m[0, :].reshape((2,) * len(cols))
            return _split(left, tuple(labels[a] for a in rows)) + _split(
                right, tuple(labels[a] for a in cols)
            )
    return [labels]


def finest_factorization(oracle: PhaseOracle) -> EntanglementClass:
    n = oracle.n_qubits
    blocks = _split(_sign_tensor(oracle), tuple(range(1, n + 1)))
    partition = QubitPartition(tuple(blocks))
    if all(len(b) == 1 for b in partition.blocks):
        kind = EntanglementKind.NON_ENTANGLING
    elif len(partition.blocks) == 1:
        kind = EntanglementKind.MAXIMALLY_ENTANGLING
    else:
        kind = EntanglementKind.PARTIALLY_ENTANGLING
    return EntanglementClass(kind, partition)


@dataclass
class Census:
    n: int
    counts: Counter = field(default_factory=Counter)
    members: dict = field(default_factory=dict)

    @property
    def total(self) -> int:
        return sum(self.counts.values())


def census_by_class(n: int) -> Census:
    """Classify the oracle of every constant or balanced function on n bits."""
    if not 1 <= n <= 3:
        raise ValueError(f"n must be in 1..3, got {n}")
    census = Census(n)
    for kind in EntanglementKind:
        census.counts[kind] = 0
        census.members[kind] = []
    for f in enumerate_functions(n):
        cls = finest_factorization(build_phase_oracle(f))
        census.counts[cls.kind] += 1
        census.members[cls.kind].append(f.key)
    return census
