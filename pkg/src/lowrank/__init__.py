"""Nuclear-norm minimization for low-rank matrix recovery."""

from .linalg import (
    SvdFactors,
    RankPartition,
    additive_nuclear_check,
    frobenius_norm,
    nuclear_norm,
    nuclear_subgradient,
    numeric_rank,
    operator_norm,
    polar_factor_halley,
    rank_partition,
    svd,
    truncated_approx,
)
from .measurement import (
    EnsembleSpec,
    MeasurementOp,
    hankel_matrix,
    hankel_problem,
    identity_vec_op,
    operator_norm_estimate,
    sample,
    unvec,
    vec,
)
from .rip import (
    RipEstimate,
    estimate_delta_lower,
    monotonicity_check,
    perturbation_bound_check,
    subspace_distance,
)
from .solvers import (
    AlmConfig,
    SolveResult,
    SubgradientConfig,
    check_optimality,
    dual_value,
    project_affine,
    solve_alm,
    solve_subgradient,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
