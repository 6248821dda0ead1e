"""Feasibility and synthesis of Gaussian covariance matrices with prescribed
symplectic spectra and local mode data."""

from .config import DEFAULT, Tolerances
from .core import (
    CovarianceMatrix,
    EulerFactors,
    SpectrumVector,
    SymplecticForm,
    SymplecticTransform,
    euler_decompose,
    random_symplectic,
    symplectic_eigenvalues,
    symplectic_form,
    symplectic_trace,
    williamson,
)
from .entropy import (
    EntropyReport,
    entanglement_profile,
    entropy_report,
    entropy_s,
    entropy_s_inverse,
    entropy_upper_bound,
    sharing_feasible,
)
from .marginals import (
    FeasibilityVerdict,
    LocalDiagonal,
    TemperatureVector,
    b_to_temperature,
    check_matrix_consistency,
    check_mixed,
    check_pure,
    local_diagonal,
    local_normal_form,
    temperature_to_b,
)
from .circuits import (
    PreparationCircuit,
    circuit_from_mixed,
    circuit_from_pure,
    parse_circuit,
    passive_to_two_mode_rotations,
    replay_circuit,
    serialize_circuit,
)
from .synthesis import (
    SynthesisTrace,
    TwoModeBlock,
    replay_trace,
    sample_feasible_pair,
    solve_two_mode,
    synthesize,
    synthesize_pure,
    two_mode_eigenvalues_closed_form,
)

__version__ = "0.1.0"

__all__ = [
    "CovarianceMatrix",
    "DEFAULT",
    "EntropyReport",
    "EulerFactors",
    "FeasibilityVerdict",
    "LocalDiagonal",
    "PreparationCircuit",
    "SpectrumVector",
    "SymplecticForm",
    "SymplecticTransform",
    "SynthesisTrace",
    "TemperatureVector",
    "Tolerances",
    "TwoModeBlock",
    "b_to_temperature",
    "check_matrix_consistency",
    "check_mixed",
    "check_pure",
    "circuit_from_mixed",
    "circuit_from_pure",
    "entanglement_profile",
    "entropy_report",
    "entropy_s",
    "entropy_s_inverse",
    "entropy_upper_bound",
    "euler_decompose",
    "local_diagonal",
    "local_normal_form",
    "parse_circuit",
    "passive_to_two_mode_rotations",
    "random_symplectic",
    "replay_circuit",
    "replay_trace",
    "sample_feasible_pair",
    "serialize_circuit",
    "sharing_feasible",
    "solve_two_mode",
    "symplectic_eigenvalues",
    "symplectic_form",
    "symplectic_trace",
    "synthesize",
    "synthesize_pure",
    "temperature_to_b",
    "two_mode_eigenvalues_closed_form",
    "williamson",
]
