"""Spin systems and single-spin operators in the product-operator basis."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from ..qcore import I2, SIGMA_X, SIGMA_Y, SIGMA_Z, kron_all

MAX_SPINS = 3
CONFIG_KEYS = {"n_spins", "shifts_hz", "couplings_hz", "weights"}

SINGLE_SPIN = {
    "E": I2,
    "x": SIGMA_X / 2,
    "y": SIGMA_Y / 2,
    "z": SIGMA_Z / 2,
}


class ConfigError(ValueError):
    """Invalid spin-system configuration."""


@dataclass(frozen=True)
class SpinSystem:
    """Weakly coupled spin-1/2 system.

    Parameters
    ----------
    n_spins : int
        Number of spins, 1..3.
    shifts_hz : tuple of float
        Resonance offset of each spin in the rotating frame (Hz).
    couplings_hz : dict
        ``{(i, j): J}`` with ``i < j`` (1-based), scalar couplings in Hz.
    weights : tuple of float
        Thermal polarization weight of each spin.
    """

    n_spins: int
    shifts_hz: tuple
    couplings_hz: dict = field(default_factory=dict)
    weights: tuple = None

    def __post_init__(self):
        n = self.n_spins
        if not isinstance(n, int) or not 1 <= n <= MAX_SPINS:
            raise ConfigError(f"n_spins must be an integer in 1..{MAX_SPINS}, got {n!r}")
        shifts = tuple(float(s) for s in self.shifts_hz)
        if len(shifts) != n:
            raise ConfigError(f"expected {n} shifts, got {len(shifts)}")
        couplings = {}
        for pair, j in dict(self.couplings_hz).items():
            a, b = sorted(int(p) for p in pair)
            if a == b or a < 1 or b > n:
                raise ConfigError(f"invalid coupling pair {pair!r}")
            if (a, b) in couplings:
                raise ConfigError(f"coupling {a},{b} given twice")
            couplings[(a, b)] = float(j)
        weights = (1.0,) * n if self.weights is None else tuple(float(w) for w in self.weights)
        if len(weights) != n:
            raise ConfigError(f"expected {n} weights, got {len(weights)}")
        for v in shifts + weights + tuple(couplings.values()):
            if not math.isfinite(v):
                raise ConfigError("spin-system parameters must be finite")
        object.__setattr__(self, "shifts_hz", shifts)
        object.__setattr__(self, "couplings_hz", couplings)
        object.__setattr__(self, "weights", weights)

    @property
    def dim(self) -> int:
        return 1 << self.n_spins

    def coupling(self, i: int, j: int) -> float:
        """J between spins i and j (0.0 when absent)."""
        return self.couplings_hz.get(tuple(sorted((i, j))), 0.0)

    def check_spin(self, k: int) -> None:
        if not 1 <= k <= self.n_spins:
            raise ValueError(f"unknown spin {k} (system has {self.n_spins} spins)")

    def replace(self, **changes) -> "SpinSystem":
        params = dict(
            n_spins=self.n_spins,
            shifts_hz=self.shifts_hz,
            couplings_hz=self.couplings_hz,
            weights=self.weights,
        )
        params.update(changes)
        return SpinSystem(**params)

    @classmethod
    def from_dict(cls, doc: dict) -> "SpinSystem":
        if not isinstance(doc, dict):
            raise ConfigError("spin-system config must be a JSON object")
        unknown = set(doc) - CONFIG_KEYS
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        missing = {"n_spins", "shifts_hz"} - set(doc)
        if missing:
            raise ConfigError(f"missing config keys: {', '.join(sorted(missing))}")
        couplings = {}
        for key, j in doc.get("couplings_hz", {}).items():
            try:
                pair = tuple(int(p) for p in key.split(","))
            except ValueError:
                raise ConfigError(f"bad coupling key {key!r}, expected 'i,j'") from None
            if len(pair) != 2:
                raise ConfigError(f"bad coupling key {key!r}, expected 'i,j'")
            couplings[pair] = j
        return cls(
            n_spins=doc["n_spins"],
            shifts_hz=doc["shifts_hz"],
            couplings_hz=couplings,
            weights=doc.get("weights"),
        )

    @classmethod
    def from_json(cls, text: str) -> "SpinSystem":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc.msg} (line {exc.lineno})") from None
        return cls.from_dict(doc)

    @classmethod
    def from_file(cls, path) -> "SpinSystem":
        return cls.from_json(Path(path).read_text())

    @classmethod
    def default(cls, n_spins: int = 3) -> "SpinSystem":
        """Shipped default system for 1, 2 or 3 spins."""
        if not 1 <= n_spins <= MAX_SPINS:
            raise ConfigError(f"no default spin system for n={n_spins}")
        text = resources.files("djnmr").joinpath(f"data/spins_{n_spins}.json").read_text()
        return cls.from_json(text)

    def to_dict(self) -> dict:
        doc = {
            "n_spins": self.n_spins,
            "shifts_hz": list(self.shifts_hz),
            "couplings_hz": {f"{i},{j}": v for (i, j), v in sorted(self.couplings_hz.items())},
        }
        if any(w != 1.0 for w in self.weights):
            doc["weights"] = list(self.weights)
        return doc


def spin_operator(n: int, labels: dict) -> np.ndarray:
    """Product of single-spin operators, e.g. ``{1: 'x', 3: 'z'}`` -> I1x I3z."""
    return kron_all([SINGLE_SPIN[labels.get(k, "E")] for k in range(1, n + 1)])


def Ix(n, k):
    return spin_operator(n, {k: "x"})


def Iy(n, k):
    return spin_operator(n, {k: "y"})


def Iz(n, k):
    return spin_operator(n, {k: "z"})


def hamiltonian_hz(sys: SpinSystem) -> np.ndarray:
    """Weak-coupling Hamiltonian in Hz: sum nu_i Iz_i + sum J_ij Iz_i Iz_j."""
    n = sys.n_spins
    h = sum(nu * Iz(n, k) for k, nu in enumerate(sys.shifts_hz, start=1))
    for (i, j), coupling in sys.couplings_hz.items():
        h = h + coupling * Iz(n, i) @ Iz(n, j)
    return np.asarray(h, dtype=complex)
