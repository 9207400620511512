"""Exactly solvable two-channel square well with purely imaginary,
antisymmetric channel coupling.

The package solves the model end to end: transcendental secular roots
and energies, piecewise-analytic two-channel bound states, biorthogonal
left partners, the family of positive metrics restoring Hermiticity,
the commuting channel observable, the small-coupling level-shift
series, the critical coupling where the real spectrum breaks down, and
an independent finite-difference oracle cross-checking all of it.
"""

from .errors import (
    BracketError,
    DegenerateMatchError,
    InvalidToleranceError,
    MetricConstraintError,
    ModelDomainError,
    NormalizationSingularError,
    NumericalFailureError,
    RootLostError,
)
from .metric import (
    MIN_ROOT_PRODUCT,
    LeftState,
    MetricWeights,
    apply_theta,
    biorthogonal_overlap,
    biorthogonality_matrix,
    build_theta_metric,
    channel_kernel,
    diagonal_overlap,
    inverse_identity_defect,
    inverse_theta_metric,
    left_vector,
    mode_hamiltonian,
    mode_spin,
    quasi_hermiticity_defect,
    spectral_reconstruct,
    spin_operator,
)
from .model import (
    BranchClass,
    CouplingPair,
    OperatorRep,
    PotentialSpec,
    RepBasis,
    check_potential_symmetry,
    classify_branch,
)
from .oracle import (
    GridSpec,
    build_hamiltonian,
    compare_spectrum,
    criticality_scan,
    discrete_theta,
    eigenpairs,
    first_complex_bracket,
    group_degenerate,
    subspace_alignment,
)
from .secular import (
    CriticalResult,
    LevelSolution,
    SpectrumResult,
    critical_coupling,
    pair_interval,
    perturbative_eps,
    residual,
    solve_level,
    spectrum,
)
from .wavefunctions import (
    ChannelState,
    doublet_family,
    evaluate,
    matching_residual,
    parity_overlap,
    phi_bilinear_product,
    phi_sesquilinear_product,
    quadrature_overlap,
    quasi_parity,
    sine_product_integral,
    solve_coefficients,
)

__version__ = "0.1.0"

__all__ = [
    "BracketError",
    "BranchClass",
    "ChannelState",
    "CouplingPair",
    "CriticalResult",
    "DegenerateMatchError",
    "GridSpec",
    "InvalidToleranceError",
    "LeftState",
    "LevelSolution",
    "MetricConstraintError",
    "MetricWeights",
    "MIN_ROOT_PRODUCT",
    "ModelDomainError",
    "NormalizationSingularError",
    "NumericalFailureError",
    "OperatorRep",
    "PotentialSpec",
    "RepBasis",
    "RootLostError",
    "SpectrumResult",
    "apply_theta",
    "biorthogonal_overlap",
    "biorthogonality_matrix",
    "build_hamiltonian",
    "build_theta_metric",
    "channel_kernel",
    "check_potential_symmetry",
    "classify_branch",
    "compare_spectrum",
    "critical_coupling",
    "criticality_scan",
    "diagonal_overlap",
    "discrete_theta",
    "doublet_family",
    "eigenpairs",
    "evaluate",
    "first_complex_bracket",
    "group_degenerate",
    "inverse_identity_defect",
    "inverse_theta_metric",
    "left_vector",
    "matching_residual",
    "mode_hamiltonian",
    "mode_spin",
    "pair_interval",
    "parity_overlap",
    "perturbative_eps",
    "phi_bilinear_product",
    "phi_sesquilinear_product",
    "quadrature_overlap",
    "quasi_hermiticity_defect",
    "quasi_parity",
    "residual",
    "sine_product_integral",
    "solve_coefficients",
    "solve_level",
    "spectral_reconstruct",
    "spectrum",
    "spin_operator",
    "subspace_alignment",
]
