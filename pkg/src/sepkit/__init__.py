"""sepkit: spectral-null pulse shaping and shared-line qubit simulation.

Design a drive pulse whose frequency profile vanishes at non-target qubit
frequencies, synthesize it in the time domain, simulate the resulting
dynamics for every qubit on a shared control line, calibrate quarter-turn
gates, and score them with randomized benchmarking.
"""

from .benchmarking import (
    DecayFit,
    RBResult,
    CliffordElement,
    clifford_table,
    excitation_rate,
    fit_decay,
    random_sequence,
    simulate_rb,
)
from .calibration import (
    CalibratedGate,
    calibrate_amplitude,
    calibrate_delta,
    repeated_gate_scan,
    rotation_angle_of,
)
from .config import DeviceConfig, default_device_config, load_device_config
from .dynamics import (
    ExcitationMap,
    PropagationResult,
    drag_scan,
    evolve_open,
    evolve_unitary,
    excitation_map,
    hamiltonian_at,
    leakage_scan,
    propagator,
)
from .profiles import FrequencyProfile, build_profile, evaluate_profile, peak_normalize
from .system import QubitSpec, SharedLineSystem
from .waveforms import (
    Waveform,
    discontinuity_metric,
    drag_augment,
    normalize_area,
    synthesize,
    waveform_spectrum,
)

__version__ = "0.1.0"

__all__ = [
    "CalibratedGate",
    "CliffordElement",
    "DecayFit",
    "DeviceConfig",
    "ExcitationMap",
    "FrequencyProfile",
    "PropagationResult",
    "QubitSpec",
    "RBResult",
    "SharedLineSystem",
    "Waveform",
    "build_profile",
    "calibrate_amplitude",
    "calibrate_delta",
    "clifford_table",
    "default_device_config",
    "discontinuity_metric",
    "drag_augment",
    "drag_scan",
    "evaluate_profile",
    "evolve_open",
    "evolve_unitary",
    "excitation_map",
    "excitation_rate",
    "fit_decay",
    "hamiltonian_at",
    "leakage_scan",
    "load_device_config",
    "normalize_area",
    "peak_normalize",
    "propagator",
    "random_sequence",
    "repeated_gate_scan",
    "rotation_angle_of",
    "simulate_rb",
    "synthesize",
    "waveform_spectrum",
]
