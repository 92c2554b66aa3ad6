"""Ancilla-free Deutsch-Jozsa simulation for one to three qubits.

Two levels are provided: an abstract state-vector run of the algorithm
(``djnmr.oracles``) and an NMR product-operator simulation that compiles
the oracles into pulse programs (``djnmr.nmr``).
"""
from .entangle import EntanglementKind, census_by_class, factorizes_over, finest_factorization
from .oracles import (
    BooleanFunction,
    Classification,
    PhaseOracle,
    build_ancilla_oracle,
    build_phase_oracle,
    canonical_operators,
    classify,
    enumerate_functions,
    run_dj,
)

__version__ = "0.1.0"
