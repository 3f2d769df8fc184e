"""Geometric phases of mixed quantum states in interferometry.

Dense-matrix toolkit: density operators and unitaries (:mod:`.core`), the
Mach-Zehnder simulation (:mod:`.interferometry`), parallel-transport
integration (:mod:`.transport`), geometric-phase routes (:mod:`.holonomy`),
the purification oracle (:mod:`.purification`) and the qubit closed forms
(:mod:`.bloch`).  :mod:`.scenario` and :mod:`.cli` run whole pipelines.
"""
from .bloch import (
    BlochState,
    SpherePath,
    bloch_density,
    geodesic_generator_path,
    qubit_phase_closed_form,
    qubit_visibility_closed_form,
    solid_angle,
    unpolarized_profile,
)
from .core import DensityOperator, SpectralDecomposition, UnitaryOperator, evolve, make_density, spectral
from .errors import InvalidInput, MixPhaseError, NumericalAbort
from .holonomy import (
    PhaseReport,
    analyze,
    average_connection,
    geometric_phase_integral,
    geometric_phase_trace,
    pure_state_phase,
)
from .interferometry import (
    InterferenceProfile,
    chi_scan,
    mach_zehnder_output,
    phase_visibility,
    simulate_profile,
)
from .purification import purified_overlap, purified_transport_check, purify
from .transport import (
    GeneratorPath,
    UnitaryPath,
    defect,
    dynamical_phase,
    frame_transport,
    integrate,
    transport_evolution,
)

__version__ = "0.1.0"

__all__ = [
    "BlochState", "SpherePath", "bloch_density", "geodesic_generator_path", "qubit_phase_closed_form",
    "qubit_visibility_closed_form", "solid_angle", "unpolarized_profile",
    "DensityOperator", "SpectralDecomposition", "UnitaryOperator", "evolve", "make_density", "spectral",
    "InvalidInput", "MixPhaseError", "NumericalAbort",
    "PhaseReport", "analyze", "average_connection", "geometric_phase_integral", "geometric_phase_trace",
    "pure_state_phase",
    "InterferenceProfile", "chi_scan", "mach_zehnder_output", "phase_visibility", "simulate_profile",
    "purified_overlap", "purified_transport_check", "purify",
    "GeneratorPath", "UnitaryPath", "defect", "dynamical_phase", "frame_transport", "integrate",
    "transport_evolution",
]
