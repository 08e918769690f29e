"""Separability of rank-two mixed states on multipartite spaces with unequal dimensions."""

__version__ = "0.1.0"

from qsep._backend import BACKEND
from qsep.criteria import (
    SeparabilityVerdict,
    Status,
    WitnessKind,
    concurrence_ratio_screen,
    corollary_threshold,
    decide,
    real_case_deltas,
)
from qsep.invariants import (
    compute_invariants,
    extract_product_factors,
    generalized_concurrence,
    pure_is_separable,
)
from qsep.quadratic import (
    analyze_common_roots,
    coefficient_arrays,
    coefficient_triple,
    enumerate_families,
)
from qsep.state import (
    CoefficientTensor,
    DensityMatrix,
    DimensionProfile,
    PureState,
    RankTwoState,
    apply_local_unitaries,
    basis_state,
    make_pure_state,
    maximally_entangled_state,
    random_product_state,
    random_pure_state,
    random_unitary,
    rank2_eigendecompose,
)

__all__ = [
    "BACKEND",
    "CoefficientTensor",
    "DensityMatrix",
    "DimensionProfile",
    "PureState",
    "RankTwoState",
    "SeparabilityVerdict",
    "Status",
    "WitnessKind",
    "analyze_common_roots",
    "apply_local_unitaries",
    "basis_state",
    "coefficient_arrays",
    "coefficient_triple",
    "compute_invariants",
    "concurrence_ratio_screen",
    "corollary_threshold",
    "decide",
    "enumerate_families",
    "extract_product_factors",
    "generalized_concurrence",
    "make_pure_state",
    "maximally_entangled_state",
    "pure_is_separable",
    "random_product_state",
    "random_pure_state",
    "random_unitary",
    "rank2_eigendecompose",
    "real_case_deltas",
    "__version__",
]
