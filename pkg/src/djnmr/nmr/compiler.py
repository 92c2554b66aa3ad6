"""Compile phase oracles into pulse sequences and verify them.

A function is compiled from its algebraic normal form.  The constant term
is a global phase and emits nothing.  Each linear term ``x_k`` is a pi
rotation about z on spin k.  Each quadratic term ``x_i x_j`` uses the
identity

    (-1)**(x_i x_j) ~ exp(-i pi/4 Z_i) exp(-i pi/4 Z_j) exp(+i pi/4 Z_i Z_j)

and gets the ZZ factor from free evolution under J_ij.  The block is

    ZPULSE i -90; ZPULSE j -90
    DELAY 1/8J(i,j); PULSE k x 180;   DELAY 1/8J(i,j); PULSE i,j x 180
    DELAY 1/8J(i,j); PULSE k -x 180;  DELAY 1/8J(i,j); PULSE i,j -x 180

with k the spectator spin (absent for two spins, where the delays are
1/4J).  Seen from the toggling frame, spins i and j are flipped halfway
through and spin k at the quarter points.  Every chemical shift and every
coupling except J_ij therefore averages to zero.  J_ij acts for a total of
1/(2J), which gives exp(-i pi/4 Z_i Z_j).  The -90 flanks absorb the
resulting sign.  The closing -x pulses undo the refocusing pulses exactly,
so the block's propagator is diagonal.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import minimize

from ..oracles import (
    BooleanFunction,
    PhaseOracle,
    require_promise,
    algebraic_normal_form,
    build_phase_oracle,
)
from ..qcore import DEFAULT_TOL, fidelity
from .sequence import MODES, Delay, Pulse, PulseSequence, expand_z, sequence_propagator
from .spins import SpinSystem

PI = math.pi


class UnsupportedFunction(ValueError):
    """No pulse recipe exists for this function."""


def _zpulse(spin, theta):
    return Pulse((spin,), "z", theta)


def _quadratic_block(sys: SpinSystem, i: int, j: int) -> list:
    if sys.coupling(i, j) == 0.0:
        raise UnsupportedFunction(f"term x{i}x{j} needs a nonzero coupling J({i},{j})")
    spectators = tuple(k for k in range(1, sys.n_spins + 1) if k not in (i, j))
    block = [_zpulse(i, -PI / 2), _zpulse(j, -PI / 2)]
    if not spectators:
        half = Delay.over_j(Fraction(1, 4), i, j)
        block += [half, Pulse((i, j), "x", PI), half, Pulse((i, j), "-x", PI)]
        return block
    quarter = Delay.over_j(Fraction(1, 8), i, j)
    block += [
        quarter, Pulse(spectators, "x", PI),
        quarter, Pulse((i, j), "x", PI),
        quarter, Pulse(spectators, "-x", PI),
        quarter, Pulse((i, j), "-x", PI),
    ]
    return block


def compile_oracle(sys: SpinSystem, f: BooleanFunction, mode: str = "ideal") -> PulseSequence:
    """Pulse program whose propagator equals the phase oracle of ``f`` up to global phase.

    ``mode='composite'`` expands every z rotation into x/y pulses.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if f.n_bits != sys.n_spins:
        raise ValueError(f"function on {f.n_bits} bits needs {f.n_bits} spins, system has {sys.n_spins}")
    require_promise(f)
    monomials = algebraic_normal_form(f)
    if any(len(m) > 2 for m in monomials):
        raise UnsupportedFunction(
            f"function {f.bitstring} has a cubic ANF term; no three-spin recipe"
        )
    elements = []
    for m in monomials:
        if len(m) == 2:
            elements += _quadratic_block(sys, *m)
    for m in monomials:
        if len(m) == 1:
            elements.append(_zpulse(m[0], PI))
    seq = PulseSequence(tuple(elements), name=f"oracle {f.bitstring}")
    if mode == "composite":
        seq = expand_z(sys, seq)
    return seq


# --- literal transcriptions -------------------------------------------------

_CYCLE = {1: 2, 2: 3, 3: 1}


def printed_sequence(name: str, tau_factor=1) -> PulseSequence:
    """The printed U6..U9 sequences, with tau_ij = tau_factor / J_ij.

    The printed text uses ``tau_factor = 1``.  U7 and U8 are U6 with the
    spin labels cyclically shifted.
    """
    tau = Fraction(tau_factor)
    half = tau / 2
    key = name.upper()
    if key in ("U6", "U7", "U8"):
        shift = int(key[1]) - 6
        p = lambda s: _cycle(s, shift)  # noqa: E731
        a, b, c = p(1), p(2), p(3)
        elements = (
            _zpulse(b, PI / 2), _zpulse(c, PI / 2),
            Delay.over_j(half, b, c),
            Pulse((b, c), "x", PI),
            Delay.over_j(half, b, c),
            _zpulse(a, PI),
        )
    elif key == "U9":
        elements = (
            _zpulse(1, PI / 2), _zpulse(3, PI / 2),
            Delay.over_j(half, 1, 2),
            Pulse((1, 2), "x", PI),
            Delay.over_j(half, 1, 2),
            Delay.over_j(half, 2, 3),
            Pulse((2, 3), "x", PI),
            Delay.over_j(half, 2, 3),
        )
    else:
        raise KeyError(f"no printed pulse sequence for {name!r}")
    return PulseSequence(elements, name=f"{key} as printed, tau = {tau}/J")


def _cycle(spin, times):
    for _ in range(times):
        spin = _CYCLE[spin]
    return spin


# --- verification ----------------------------------------------------------

@dataclass(frozen=True)
class VerificationReport:
    fidelity: float
    phase_free_fidelity: float
    unitarity_error: float
    tol: float = DEFAULT_TOL

    @property
    def passed(self) -> bool:
        return self.fidelity >= 1.0 - self.tol

    @property
    def passed_phase_free(self) -> bool:
        return self.phase_free_fidelity >= 1.0 - self.tol


def phase_free_fidelity(target: np.ndarray, u: np.ndarray) -> float:
    """max over single-spin z phases D of |tr(target^dag D u)| / dim.

    Only the diagonal of ``target^dag u`` survives when ``target`` is
    diagonal, so off-diagonal leakage of ``u`` caps the result below 1.
    """
    dim = u.shape[0]
    n = dim.bit_length() - 1
    r = np.diag(target.conj().T @ u)
    bits = np.array([[(x >> (n - k)) & 1 for k in range(1, n + 1)] for x in range(dim)])

    def overlap(phi):
        return abs(np.sum(r * np.exp(1j * bits @ phi))) / dim

    starts = [np.zeros(n)]
    if abs(r[0]) > 1e-12:
        starts.append(np.array([-np.angle(r[1 << (n - k)] / r[0]) for k in range(1, n + 1)]))
    best = max(overlap(s) for s in starts)
    for s in starts:
        res = minimize(lambda p: -overlap(p), s, method="Nelder-Mead",
                       options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 4000})
        best = max(best, -res.fun)
    return float(min(best, 1.0))


def verify_sequence(sys: SpinSystem, seq: PulseSequence, target, mode: str = "ideal",
                    tol: float = DEFAULT_TOL) -> VerificationReport:
    """Compare a sequence's propagator to a target oracle (PhaseOracle or matrix)."""
    if isinstance(target, PhaseOracle):
        target = target.matrix
    u = sequence_propagator(sys, seq, mode)
    err = float(np.max(np.abs(u.conj().T @ u - np.eye(sys.dim))))
    return VerificationReport(fidelity(target, u), phase_free_fidelity(target, u), err, tol)


def compile_and_verify(sys: SpinSystem, f: BooleanFunction, mode: str = "ideal",
                       tol: float = DEFAULT_TOL):
    seq = compile_oracle(sys, f, mode)
    return seq, verify_sequence(sys, seq, build_phase_oracle(f), mode, tol)
