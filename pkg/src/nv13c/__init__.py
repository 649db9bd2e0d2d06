"""NV-(3)13C electron-nuclear spin simulator.

Builds the axial-field ground-state Hamiltonian of an NV- center coupled to
first-shell 13C nuclei, tracks its 24 eigenlevels across field sweeps,
scores every transition with the kappa observability factor, hunts for
decoherence-protected transitions (minima of |d nu / dB|), and synthesizes
CW-ODMR spectra.
"""

from .fieldcal import field_error, field_error_from_linewidth
from .spectra import (
    MeasuredPeak,
    PeakAssignment,
    SpectrumTrace,
    assign_peaks,
    synthesize_spectrum,
)
from .spinops import (
    EigenSolution,
    SpinOperators,
    embed,
    hermitian_eig,
    rotate_tensor,
    spin_matrices,
)
from .sweep import (
    FieldGrid,
    LacRecord,
    TrackedSpectrum,
    classify_manifold,
    find_lacs,
    sweep_eigen,
)
from .system import (
    ElectronParams,
    NucleusParams,
    SpinSystem,
    bare_nv_system,
    build_hamiltonian,
    eigensolve,
    hyperfine_term,
    load_system,
    nv3c_system,
    parse_system,
)
from .transitions import (
    TransitionRecord,
    enumerate_transitions,
    gamma_eff_hellmann_feynman,
    pumped_density,
    transition_curve,
    transition_intensity,
    transition_matrix_element,
)
from .zefoz import DptRecord, LinewidthModel, epsilon_table, predict_linewidth, scan_dpt

__version__ = "0.1.0"

__all__ = [
    "DptRecord",
    "EigenSolution",
    "ElectronParams",
    "FieldGrid",
    "LacRecord",
    "LinewidthModel",
    "MeasuredPeak",
    "NucleusParams",
    "PeakAssignment",
    "SpectrumTrace",
    "SpinOperators",
    "SpinSystem",
    "TrackedSpectrum",
    "TransitionRecord",
    "assign_peaks",
    "bare_nv_system",
    "build_hamiltonian",
    "classify_manifold",
    "eigensolve",
    "embed",
    "enumerate_transitions",
    "epsilon_table",
    "field_error",
    "field_error_from_linewidth",
    "find_lacs",
    "gamma_eff_hellmann_feynman",
    "hermitian_eig",
    "hyperfine_term",
    "load_system",
    "nv3c_system",
    "parse_system",
    "predict_linewidth",
    "pumped_density",
    "rotate_tensor",
    "scan_dpt",
    "spin_matrices",
    "sweep_eigen",
    "synthesize_spectrum",
    "transition_curve",
    "transition_intensity",
    "transition_matrix_element",
]
