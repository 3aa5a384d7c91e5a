"""Conditional-phase gates from spin-switched barrier scattering on a mirrored line.

Two delta barriers (switched on and off by two static spins) in front of a
hard wall give every incident wavevector a spin-conditional reflection phase;
at the resonant geometry the four phases realize a controlled-Z gate.  The
package provides the stationary solver, a waveguide-photon emulator of the
same amplitudes, process-fidelity analysis, finite-bandwidth wavepacket
dynamics, and a deterministic CLI for sweeps and reports.
"""
from czscatter._backend import backend_name
from czscatter.core import (
    CONFIG_ORDER,
    CouplingModel,
    Geometry,
    Massive,
    OpenLineResult,
    Photonic,
    ReflectionGate,
    ScatteringSolution,
    SpinConfig,
    effective_potential,
    open_line_scattering,
    reflection_amplitude_closed_form,
    reflection_gate,
    solve_stationary_state,
    stationary_amplitudes,
    wavefunction_eval,
)
from czscatter.errors import (
    AdmissibilityError,
    ConsistencyError,
    CzScatterError,
    DegeneratePhaseError,
    PoleError,
    SolveError,
)
from czscatter.gates import (
    CZ_GATE,
    CZRegime,
    FidelityCurve,
    NonRegimeWarning,
    PAULI_LABELS,
    ProcessMatrix,
    cz_regime,
    fidelity_closed_form,
    fidelity_sweep,
    fidelity_window_halfwidth,
    ideal_gate_limit,
    pauli_chi,
    process_fidelity,
)
from czscatter.photonic import (
    EquivalenceReport,
    GroundDoubletState,
    LambdaAtomParams,
    bright_dark_inverse,
    bright_dark_transform,
    detuning_for_gamma,
    effective_coupling,
    photonic_stationary_state,
    verify_equivalence,
    wavevector_for_gamma,
)
from czscatter.tables import SweepTable
from czscatter.wavepacket import (
    ConditionalEvolution,
    DurationReport,
    GaussianPacket,
    GridSpec,
    PacketEvolution,
    QuadratureRule,
    WORKING_CONDITION_PRESETS,
    branch_overlap_matrix,
    completion_time,
    conditional_evolution,
    evolve,
    gate_duration,
    gaussian_packet,
    locate_resonance,
    measured_spectral_overlap,
    packet_gate_fidelity,
    spectral_overlap,
    time_domain_gate_fidelity,
    working_condition,
    working_condition_preset,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "backend_name",
    # errors
    "CzScatterError",
    "PoleError",
    "AdmissibilityError",
    "DegeneratePhaseError",
    "SolveError",
    "ConsistencyError",
    # core
    "SpinConfig",
    "CONFIG_ORDER",
    "Geometry",
    "Massive",
    "Photonic",
    "CouplingModel",
    "ScatteringSolution",
    "ReflectionGate",
    "OpenLineResult",
    "effective_potential",
    "stationary_amplitudes",
    "solve_stationary_state",
    "reflection_amplitude_closed_form",
    "reflection_gate",
    "open_line_scattering",
    "wavefunction_eval",
    # photonic
    "LambdaAtomParams",
    "GroundDoubletState",
    "bright_dark_transform",
    "bright_dark_inverse",
    "effective_coupling",
    "detuning_for_gamma",
    "wavevector_for_gamma",
    "photonic_stationary_state",
    "EquivalenceReport",
    "verify_equivalence",
    # gates
    "CZ_GATE",
    "PAULI_LABELS",
    "CZRegime",
    "cz_regime",
    "ideal_gate_limit",
    "ProcessMatrix",
    "pauli_chi",
    "process_fidelity",
    "fidelity_closed_form",
    "FidelityCurve",
    "fidelity_sweep",
    "fidelity_window_halfwidth",
    "NonRegimeWarning",
    # wavepacket
    "GaussianPacket",
    "gaussian_packet",
    "QuadratureRule",
    "locate_resonance",
    "GridSpec",
    "spectral_overlap",
    "measured_spectral_overlap",
    "PacketEvolution",
    "evolve",
    "ConditionalEvolution",
    "conditional_evolution",
    "branch_overlap_matrix",
    "completion_time",
    "packet_gate_fidelity",
    "time_domain_gate_fidelity",
    "DurationReport",
    "gate_duration",
    "working_condition",
    "working_condition_preset",
    "WORKING_CONDITION_PRESETS",
    # tables
    "SweepTable",
]
