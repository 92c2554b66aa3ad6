"""Pulse sequences: elements, propagators and the line-oriented pulse DSL.

DSL grammar, one statement per line, ``#`` starts a comment::

    PULSE <spin-list> <axis> <angle-deg>     PULSE 2,3 x 180
    DELAY <seconds | k/mJ(i,j)>              DELAY 1/2J(2,3)
    ZPULSE <spin> <angle-deg>                ZPULSE 1 180

Axes are ``x, -x, y, -y, z, -z``.  A symbolic delay ``k/mJ(i,j)`` means
``k / (m * J_ij)`` seconds and is resolved against a spin system when the
sequence is compiled into a propagator.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from ..qcore import I2, SIGMA_X, SIGMA_Y, SIGMA_Z, kron_all
from .spins import SpinSystem

AXES = {"x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z}
VALID_AXES = ("x", "-x", "y", "-y", "z", "-z")
MODES = ("ideal", "composite")


class SequenceSyntaxError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True)
class Pulse:
    """Instantaneous rotation of ``spins`` about ``axis`` by ``angle`` radians."""

    spins: tuple
    axis: str
    angle: float

    def __post_init__(self):
        spins = tuple(sorted({int(s) for s in self.spins}))
        if not spins:
            raise ValueError("pulse needs at least one spin")
        if self.axis not in VALID_AXES:
            raise ValueError(f"invalid axis {self.axis!r}")
        if not -2 * math.pi < self.angle <= 2 * math.pi + 1e-12:
            raise ValueError(f"pulse angle {self.angle} outside (-2pi, 2pi]")
        object.__setattr__(self, "spins", spins)

    @property
    def is_z(self) -> bool:
        return self.axis.endswith("z")

    @property
    def degrees(self) -> float:
        return math.degrees(self.angle)


@dataclass(frozen=True)
class Delay:
    """Free evolution, either in seconds or as ``factor / J(i, j)``."""

    seconds: float = None
    factor: Fraction = None
    pair: tuple = None

    def __post_init__(self):
        if (self.seconds is None) == (self.pair is None):
            raise ValueError("delay needs either seconds or a coupling reference")
        if self.seconds is not None and (not math.isfinite(self.seconds) or self.seconds < 0):
            raise ValueError(f"negative or non-finite delay {self.seconds}")
        if self.pair is not None:
            a, b = sorted(self.pair)
            factor = Fraction(self.factor if self.factor is not None else 1)
            if factor < 0:
                raise ValueError("negative delay factor")
            object.__setattr__(self, "pair", (a, b))
            object.__setattr__(self, "factor", factor)

    @classmethod
    def over_j(cls, factor, i: int, j: int) -> "Delay":
        return cls(factor=Fraction(factor), pair=(i, j))

    def duration(self, sys: SpinSystem) -> float:
        if self.seconds is not None:
            return self.seconds
        coupling = sys.coupling(*self.pair)
        if coupling == 0.0:
            raise ValueError(f"delay references absent coupling J({self.pair[0]},{self.pair[1]})")
        return float(self.factor) / coupling


Element = Union[Pulse, Delay]


@dataclass(frozen=True)
class PulseSequence:
    elements: tuple = ()
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __add__(self, other: "PulseSequence") -> "PulseSequence":
        return PulseSequence(self.elements + other.elements, self.name or other.name)

    def validate(self, sys: SpinSystem) -> None:
        for el in self.elements:
            if isinstance(el, Pulse):
                for s in el.spins:
                    sys.check_spin(s)
            else:
                if el.pair is not None:
                    for s in el.pair:
                        sys.check_spin(s)
                el.duration(sys)

    def total_delay(self, sys: SpinSystem) -> float:
        return sum(el.duration(sys) for el in self.elements if isinstance(el, Delay))

    def to_text(self) -> str:
        lines = [f"# {self.name}"] if self.name else []
        lines += [format_element(el) for el in self.elements]
        return "\n".join(lines) + "\n"


def _fmt_number(v: float) -> str:
    r = round(v)
    if abs(v - r) < 1e-9:
        return str(int(r))
    return f"{v:.10g}"


def format_element(el: Element) -> str:
    if isinstance(el, Pulse):
        if el.is_z and len(el.spins) == 1 and el.axis == "z":
            return f"ZPULSE {el.spins[0]} {_fmt_number(el.degrees)}"
        spins = ",".join(map(str, el.spins))
        return f"PULSE {spins} {el.axis} {_fmt_number(el.degrees)}"
    if el.pair is None:
        return f"DELAY {el.seconds:.10g}"
    f = el.factor
    den = "" if f.denominator == 1 else str(f.denominator)
    return f"DELAY {f.numerator}/{den}J({el.pair[0]},{el.pair[1]})"


# --- parsing ---------------------------------------------------------------

_SYMBOLIC = re.compile(r"^(\d+)/(\d*)J\((\d+),(\d+)\)$")


def _parse_angle(tok: str, lineno: int) -> float:
    try:
        deg = float(tok)
    except ValueError:
        raise SequenceSyntaxError(lineno, f"bad angle {tok!r}") from None
    if not math.isfinite(deg) or not -360.0 < deg <= 360.0:
        raise SequenceSyntaxError(lineno, f"angle {tok} outside (-360, 360]")
    return math.radians(deg)


def _parse_spins(tok: str, lineno: int) -> tuple:
    try:
        spins = tuple(int(s) for s in tok.split(","))
    except ValueError:
        raise SequenceSyntaxError(lineno, f"bad spin list {tok!r}") from None
    if len(set(spins)) != len(spins):
        raise SequenceSyntaxError(lineno, f"repeated spin in {tok!r}")
    return spins


def _parse_delay(tok: str, lineno: int) -> Delay:
    m = _SYMBOLIC.match(tok.replace(" ", ""))
    if m:
        k, den, i, j = m.groups()
        den = int(den) if den else 1
        if den == 0:
            raise SequenceSyntaxError(lineno, "zero denominator in delay")
        if i == j:
            raise SequenceSyntaxError(lineno, f"coupling J({i},{j}) needs two spins")
        return Delay.over_j(Fraction(int(k), den), int(i), int(j))
    try:
        seconds = float(tok)
    except ValueError:
        raise SequenceSyntaxError(lineno, f"bad delay {tok!r}") from None
    if not math.isfinite(seconds) or seconds < 0:
        raise SequenceSyntaxError(lineno, f"negative or non-finite delay {tok}")
    return Delay(seconds=seconds)


def parse_sequence(text: str, sys: SpinSystem = None, name: str = "") -> PulseSequence:
    """Parse pulse DSL text.

    When ``sys`` is given every element is also checked against it, so an
    unknown spin or a delay that refers to an absent coupling raises
    ``SequenceSyntaxError`` carrying the offending line number.
    """
    elements = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        cmd = toks[0].upper()
        args = toks[1:]
        if cmd == "PULSE":
            if len(args) != 3:
                raise SequenceSyntaxError(lineno, "PULSE takes <spins> <axis> <angle>")
            axis = args[1].lower()
            if axis not in VALID_AXES:
                raise SequenceSyntaxError(lineno, f"bad axis {args[1]!r}")
            el = Pulse(_parse_spins(args[0], lineno), axis, _parse_angle(args[2], lineno))
        elif cmd == "ZPULSE":
            if len(args) != 2:
                raise SequenceSyntaxError(lineno, "ZPULSE takes <spin> <angle>")
            spins = _parse_spins(args[0], lineno)
            if len(spins) != 1:
                raise SequenceSyntaxError(lineno, "ZPULSE acts on a single spin")
            el = Pulse(spins, "z", _parse_angle(args[1], lineno))
        elif cmd == "DELAY":
            if len(args) < 1:
                raise SequenceSyntaxError(lineno, "DELAY takes a duration")
            el = _parse_delay("".join(args), lineno)
        else:
            raise SequenceSyntaxError(lineno, f"unknown statement {toks[0]!r}")
        if sys is not None:
            try:
                PulseSequence((el,)).validate(sys)
            except ValueError as exc:
                raise SequenceSyntaxError(lineno, str(exc)) from None
        elements.append(el)
    return PulseSequence(tuple(elements), name)


# --- propagators -----------------------------------------------------------

def _single_rotation(axis: str, angle: float) -> np.ndarray:
    sign = -1.0 if axis.startswith("-") else 1.0
    sigma = AXES[axis[-1]]
    return math.cos(angle / 2) * I2 - 1j * sign * math.sin(angle / 2) * sigma


def rotation_propagator(sys: SpinSystem, spins, axis: str, angle: float) -> np.ndarray:
    """exp(-i * angle * sum_k I_axis^k) over the listed spins.

    The single-spin generators commute, so the propagator is the tensor
    product of closed-form 2x2 rotations.
    """
    if axis not in VALID_AXES:
        raise ValueError(f"invalid axis {axis!r}")
    spins = set(spins)
    for s in spins:
        sys.check_spin(s)
    r = _single_rotation(axis, angle)
    return kron_all([r if k in spins else I2 for k in range(1, sys.n_spins + 1)])


def level_energies_hz(sys: SpinSystem) -> np.ndarray:
    """Diagonal of the weak-coupling Hamiltonian; bit 0 of a spin is m = +1/2."""
    n = sys.n_spins
    x = np.arange(sys.dim)
    m = np.array([0.5 - ((x >> (n - k)) & 1) for k in range(1, n + 1)])
    energy = np.asarray(sys.shifts_hz) @ m
    for (i, j), coupling in sys.couplings_hz.items():
        energy = energy + coupling * m[i - 1] * m[j - 1]
    return energy


def delay_propagator(sys: SpinSystem, duration: float) -> np.ndarray:
    """exp(-i 2 pi t H) for the diagonal weak-coupling Hamiltonian (Hz)."""
    if not duration >= 0:
        raise ValueError(f"delay duration must be >= 0, got {duration}")
    phases = -2j * np.pi * duration * level_energies_hz(sys)
    return np.diag(np.exp(phases))


def composite_z(sys: SpinSystem, spin: int, theta: float) -> PulseSequence:
    """Z rotation built from x and y pulses.

    Time order is (pi/2)_-x, (theta)_y, (pi/2)_x, i.e. the operator product
    R_x(pi/2) R_y(theta) R_-x(pi/2) = exp(-i theta Iz).
    """
    sys.check_spin(spin)
    half = math.pi / 2
    return PulseSequence(
        (Pulse((spin,), "-x", half), Pulse((spin,), "y", theta), Pulse((spin,), "x", half)),
        name=f"composite z {math.degrees(theta):g} on spin {spin}",
    )


def expand_z(sys: SpinSystem, seq: PulseSequence) -> PulseSequence:
    """Replace every z pulse by its composite x/y expansion."""
    out = []
    for el in seq:
        if isinstance(el, Pulse) and el.is_z:
            theta = -el.angle if el.axis == "-z" else el.angle
            for s in el.spins:
                out.extend(composite_z(sys, s, theta).elements)
        else:
            out.append(el)
    return PulseSequence(tuple(out), seq.name)


def element_propagator(sys: SpinSystem, el: Element, mode: str = "ideal") -> np.ndarray:
    if isinstance(el, Delay):
        return delay_propagator(sys, el.duration(sys))
    if el.is_z and mode == "composite":
        return sequence_propagator(sys, expand_z(sys, PulseSequence((el,))))
    return rotation_propagator(sys, el.spins, el.axis, el.angle)


def sequence_propagator(sys: SpinSystem, seq: PulseSequence, mode: str = "ideal") -> np.ndarray:
    """Overall propagator; elements act in list (time) order."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    seq.validate(sys)
    u = np.eye(sys.dim, dtype=complex)
    for el in seq:
        u = element_propagator(sys, el, mode) @ u
    return u
