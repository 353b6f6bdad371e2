"""Superradiant Dicke populations, Hausdorff moment separability, and
spin-coherent mixture reconstruction.

The functional core lives in the submodules; this namespace re-exports the
pieces most workflows touch. Scikit-learn style wrappers are available in
``dicke_moments.estimators``.
"""

from .bernstein import (
    MomentGenerator,
    MomentVector,
    TransformMatrix,
    coherent_populations,
    moment_generator,
    moments_to_populations,
    phase_averaged_product_density,
    populations_to_moments,
    transform_matrix,
)
from .bipartite import (
    ReducedDickeMixture,
    TwoSpinState,
    bipartition_negativity,
    delta_witness,
    hypergeometric_marginal,
    reduced_dicke_mixture,
    two_spin_coefficients,
    two_spin_negativity,
    two_spin_state,
)
from .dicke_core import (
    PopulationVector,
    RateMatrix,
    Trajectory,
    dicke_populations,
    evolve,
    evolve_trajectory,
    intensity,
    intensity_from_decomposition,
    rate_coefficients,
    rate_matrix,
)
from .hausdorff import (
    DEFAULT_TOL_PSD,
    HankelPair,
    SeparabilityVerdict,
    build_hankel_pair,
    hankel_negativity,
    validate_moments,
)
from .leading_order import (
    LeadingOrderReport,
    PrecisionContext,
    kr_closed_form,
    leading_coefficient_extract,
    linearized_minor_check,
)
from .reconstruct import (
    Decomposition,
    InfeasibleMomentsError,
    NegativeWeightError,
    RankDetectionError,
    ReconstructionError,
    decomposition_residual,
    reconstruct_decomposition,
    solve_vandermonde_dual,
    trajectory_decomposition,
)

__version__ = "1.0.0"

__all__ = [
    "PopulationVector",
    "RateMatrix",
    "Trajectory",
    "rate_coefficients",
    "rate_matrix",
    "evolve",
    "evolve_trajectory",
    "intensity",
    "intensity_from_decomposition",
    "dicke_populations",
    "MomentVector",
    "TransformMatrix",
    "MomentGenerator",
    "transform_matrix",
    "populations_to_moments",
    "moments_to_populations",
    "moment_generator",
    "coherent_populations",
    "phase_averaged_product_density",
    "HankelPair",
    "SeparabilityVerdict",
    "build_hankel_pair",
    "validate_moments",
    "hankel_negativity",
    "DEFAULT_TOL_PSD",
    "Decomposition",
    "ReconstructionError",
    "RankDetectionError",
    "InfeasibleMomentsError",
    "NegativeWeightError",
    "reconstruct_decomposition",
    "decomposition_residual",
    "trajectory_decomposition",
    "solve_vandermonde_dual",
    "PrecisionContext",
    "LeadingOrderReport",
    "kr_closed_form",
    "linearized_minor_check",
    "leading_coefficient_extract",
    "TwoSpinState",
    "ReducedDickeMixture",
    "two_spin_coefficients",
    "two_spin_state",
    "two_spin_negativity",
    "delta_witness",
    "reduced_dicke_mixture",
    "hypergeometric_marginal",
    "bipartition_negativity",
    "__version__",
]
