"""NMR-level simulation: spin systems, pulse programs and spectra."""
from .compiler import (
    UnsupportedFunction,
    VerificationReport,
    compile_and_verify,
    compile_oracle,
    printed_sequence,
    phase_free_fidelity,
    verify_sequence,
)
from .experiment import (
    ExperimentResult,
    ProductOperatorTerm,
    SpectralLine,
    StickSpectrum,
    evolve,
    multiplet_pattern,
    product_operator_decomposition,
    pseudo_hadamard,
    reconstruct,
    render_spectrum,
    run_experiment,
    spectral_verdict,
    spin_patterns,
    thermal_state,
)
from .sequence import (
    Delay,
    Pulse,
    PulseSequence,
    SequenceSyntaxError,
    composite_z,
    delay_propagator,
    expand_z,
    parse_sequence,
    rotation_propagator,
    sequence_propagator,
)
from .spins import ConfigError, SpinSystem, hamiltonian_hz, spin_operator
