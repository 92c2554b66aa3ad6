"""Density-matrix experiments and their readout.

Detection is taken right after the oracle: the final pseudo-Hadamard of
the algorithm and the usual (90)_y read pulse cancel, so the spectrum
reflects the state produced by pseudo-Hadamard then U_f.
"""
from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from ..oracles import BooleanFunction
from .compiler import compile_oracle
from .sequence import PulseSequence, rotation_propagator, sequence_propagator
from .spins import SpinSystem, spin_operator

LABELS = ("E", "x", "y", "z")
PO_THRESHOLD = 1e-9
CSV_HEADER = ("spin", "frequency_hz", "amp_real", "amp_imag", "partner_config")


class SpectrumWarning(UserWarning):
    pass


# --- density operators ------------------------------------------------------

def thermal_state(sys: SpinSystem) -> np.ndarray:
    """Traceless deviation matrix sum_i w_i Iz_i."""
    n = sys.n_spins
    return sum(w * spin_operator(n, {k: "z"}) for k, w in enumerate(sys.weights, start=1))


def evolve(rho: np.ndarray, u: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    u = np.asarray(u, dtype=complex)
    if rho.shape != u.shape:
        raise ValueError(f"density matrix {rho.shape} does not match propagator {u.shape}")
    return u @ rho @ u.conj().T


def pseudo_hadamard(sys: SpinSystem) -> np.ndarray:
    """Non-selective (90)_y pulse on every spin."""
    return rotation_propagator(sys, range(1, sys.n_spins + 1), "y", math.pi / 2)


# --- product operators ------------------------------------------------------

@dataclass(frozen=True)
class ProductOperatorTerm:
    """``coefficient * 2**(q-1) * prod I`` over the q non-identity labels."""

    coefficient: float
    labels: tuple

    @property
    def order(self) -> int:
        return sum(lab != "E" for lab in self.labels)

    @property
    def operator_name(self) -> str:
        parts = [f"I{k}{lab}" for k, lab in enumerate(self.labels, start=1) if lab != "E"]
        if not parts:
            return "E"
        prefix = "" if len(parts) == 1 else str(2 ** (len(parts) - 1))
        return prefix + "".join(parts)

    def matrix(self) -> np.ndarray:
        n = len(self.labels)
        q = self.order
        scale = 2.0 ** (q - 1) if q else 1.0
        return scale * spin_operator(n, {k: lab for k, lab in enumerate(self.labels, start=1)})

    def __str__(self):
        return f"{self.coefficient:+.6f} {self.operator_name}"


def product_operator_decomposition(rho: np.ndarray, threshold: float = PO_THRESHOLD) -> list:
    """Expand a deviation matrix over all 4**n product-operator strings.

    Terms with ``|c| < threshold`` are dropped.  Ordering is by number of
    non-identity labels, then lexicographic in the labels (E < x < y < z).
    """
    rho = np.asarray(rho, dtype=complex)
    n = rho.shape[0].bit_length() - 1
    terms = []
    for labels in product(LABELS, repeat=n):
        term = ProductOperatorTerm(1.0, labels)
        basis = term.matrix()
        # tr(B^2) = 2**(n-2) for q >= 1 and 2**n for the identity
        norm = np.trace(basis @ basis).real
        c = np.trace(rho @ basis).real / norm
        if abs(c) >= threshold:
            terms.append(ProductOperatorTerm(float(c), labels))
    terms.sort(key=lambda t: (t.order, [LABELS.index(lab) for lab in t.labels]))
    return terms


def reconstruct(terms, n: int) -> np.ndarray:
    out = np.zeros((1 << n, 1 << n), dtype=complex)
    for t in terms:
        out += t.coefficient * t.matrix()
    return out


def format_terms(terms) -> str:
    return "\n".join(str(t) for t in terms)


# --- spectra ----------------------------------------------------------------

@dataclass(frozen=True)
class SpectralLine:
    spin: int
    frequency_hz: float
    amplitude: complex
    partner_config: str


@dataclass
class StickSpectrum:
    lines: list
    warnings: list = field(default_factory=list)

    def for_spin(self, spin: int) -> list:
        return [ln for ln in self.lines if ln.spin == spin]

    @property
    def spins(self) -> list:
        return sorted({ln.spin for ln in self.lines})

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for ln in sorted(self.lines, key=lambda ln: (ln.spin, ln.frequency_hz)):
            w.writerow([
                ln.spin,
                f"{ln.frequency_hz:.6f}",
                _fmt_amp(ln.amplitude.real),
                _fmt_amp(ln.amplitude.imag),
                ln.partner_config,
            ])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "StickSpectrum":
        reader = csv.reader(io.StringIO(text))
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != CSV_HEADER:
            raise ValueError(f"spectrum CSV header must be {','.join(CSV_HEADER)}")
        lines = []
        for rowno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(CSV_HEADER):
                raise ValueError(f"row {rowno}: expected {len(CSV_HEADER)} fields")
            try:
                lines.append(SpectralLine(
                    int(row[0]), float(row[1]), complex(float(row[2]), float(row[3])), row[4].strip()
                ))
            except ValueError:
                raise ValueError(f"row {rowno}: malformed values") from None
        return cls(lines)


def _fmt_amp(v: float) -> str:
    s = f"{v:.9f}"
    return "0.000000000" if s == "-0.000000000" else s


def render_spectrum(rho: np.ndarray, sys: SpinSystem) -> StickSpectrum:
    """One stick per (spin, configuration of the other spins).

    The amplitude of spin i's line is ``rho[p, q]`` where p and q differ
    only in spin i, with spin i in state 1 in p and 0 in q.  Partner bit 0
    means m = +1/2, so the line sits at shift_i + sum_j J_ij m_j.
    """
    rho = np.asarray(rho, dtype=complex)
    n = sys.n_spins
    if rho.shape != (sys.dim, sys.dim):
        raise ValueError("density matrix does not match the spin system")
    if np.max(np.abs(rho - rho.conj().T)) > 1e-10:
        raise ValueError("deviation matrix is not Hermitian")
    lines = []
    for i in range(1, n + 1):
        partners = [k for k in range(1, n + 1) if k != i]
        ibit = 1 << (n - i)
        for config in product((0, 1), repeat=n - 1):
            q = sum(b << (n - k) for k, b in zip(partners, config))
            p = q | ibit
            freq = sys.shifts_hz[i - 1] + sum(
                sys.coupling(i, k) * (0.5 - b) for k, b in zip(partners, config)
            )
            lines.append(SpectralLine(i, float(freq), complex(rho[p, q]), "".join(map(str, config))))
    spec = StickSpectrum(lines)
    seen = {}
    for ln in lines:
        key = round(ln.frequency_hz, 6)
        other = seen.get(key)
        if other is not None and other != ln.spin:
            msg = f"spins {other} and {ln.spin} both have a line at {key:.6f} Hz"
            spec.warnings.append(msg)
            warnings.warn(msg, SpectrumWarning, stacklevel=2)
        seen.setdefault(key, ln.spin)
    return spec


def multiplet_pattern(amplitudes, tol: float = 1e-9, reference_phase: float = 0.0) -> str:
    """Name the phase pattern of one multiplet.

    Amplitudes are projected on the reference quadrature.  Returns one of
    ``in-phase``, ``inverted``, ``antiphase``, ``mixed`` or ``absent``.
    """
    rot = np.exp(-1j * reference_phase)
    a = np.array([(complex(x) * rot).real for x in amplitudes])
    if np.all(np.abs(a) <= tol):
        return "absent"
    if np.all(a > tol):
        return "in-phase"
    if np.all(a < -tol):
        return "inverted"
    if abs(a.sum()) <= tol * len(a) and np.any(a > tol) and np.any(a < -tol):
        return "antiphase"
    return "mixed"


def spin_patterns(spectrum: StickSpectrum, reference_phase: float = 0.0) -> dict:
    return {
        s: multiplet_pattern([ln.amplitude for ln in spectrum.for_spin(s)],
                             reference_phase=reference_phase)
        for s in spectrum.spins
    }


def spectral_verdict(spectrum: StickSpectrum, reference_phase: float = 0.0,
                     tol: float = 1e-9) -> str:
    """``CONSTANT`` when every line is positive along the reference quadrature."""
    rot = np.exp(-1j * reference_phase)
    ok = all((ln.amplitude * rot).real > tol for ln in spectrum.lines)
    return "CONSTANT" if ok and spectrum.lines else "BALANCED"


def reference_phase(sys: SpinSystem) -> float:
    """Dominant quadrature of the constant-function (do-nothing) run."""
    rho = evolve(thermal_state(sys), pseudo_hadamard(sys))
    total = sum(ln.amplitude for ln in render_spectrum(rho, sys).lines)
    return float(np.angle(total))


# --- full experiment --------------------------------------------------------

@dataclass
class ExperimentResult:
    rho: np.ndarray
    spectrum: StickSpectrum
    sequence: PulseSequence
    reference_phase: float = 0.0

    @property
    def terms(self) -> list:
        return product_operator_decomposition(self.rho)

    @property
    def verdict(self) -> str:
        return spectral_verdict(self.spectrum, self.reference_phase)

    @property
    def patterns(self) -> dict:
        return spin_patterns(self.spectrum, self.reference_phase)


def run_experiment(sys: SpinSystem, f: BooleanFunction = None, mode: str = "ideal",
                   sequence: PulseSequence = None) -> ExperimentResult:
    """Thermal state, pseudo-Hadamard, then the compiled oracle for ``f``.

    Pass ``sequence`` instead of ``f`` to run an arbitrary pulse program in
    the same frame.
    """
    if (f is None) == (sequence is None):
        raise ValueError("give exactly one of f or sequence")
    if sequence is None:
        sequence = compile_oracle(sys, f, mode)
    rho = evolve(thermal_state(sys), pseudo_hadamard(sys))
    rho = evolve(rho, sequence_propagator(sys, sequence, mode))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SpectrumWarning)
        spectrum = render_spectrum(rho, sys)
        ref = reference_phase(sys)
    return ExperimentResult(rho, spectrum, sequence, ref)
