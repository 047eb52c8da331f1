"""Certified convex lower bounds for exact sparse optimization.

The library computes lower bounds for combinatorial sparsity-constrained
problems (l0 level sets and unions of coordinate subspaces) through a
ray-invariant conjugacy, and verifies every bound against brute-force
enumeration oracles at desk scale.
"""

from .errors import (
    BoundViolationError,
    ConfigError,
    DimensionMismatchError,
    EnumerationGuardError,
    NotANormError,
    PropernessError,
    SolverError,
    SparseLBError,
)
from .extreal import NEG_INF, POS_INF, ExtReal, lower_add, neg, upper_add
from .conjugacy import (
    CouplingTable,
    ExtFunction,
    SampledSpace,
    ThetaMapping,
    biconjugate,
    conjugate,
    infimal_postcomposition,
    lower_bound_finite,
    polar_membership,
    reverse_conjugate,
    support_function,
    theta_conjugate_identity_check,
    weak_duality_gap,
)
from .sparse_norms import (
    gauge_norm,
    ksupport_norm,
    l0,
    level_set_membership,
    lmo_ksupport_ball,
)
from .caprac import (
    AscentConfig,
    LevelSetIndicator,
    RadialProfile,
    SphereSearchConfig,
    caprac_conjugate,
    caprac_coupling,
    delta_levelset_conjugate,
    l0_biconjugate_estimate,
    l0_conjugate,
    normalize,
    radial_infimum,
)
from .lower_bound import (
    BoundReport,
    DualSearchConfig,
    GridConfig,
    LeastSquaresObjective,
    LsqInstance,
    SupportSet,
    dual_lower_bound_l0,
    dual_lower_bound_lsq,
    exact_sparse_lsq,
    primal_ksupport_grid,
)
from .gso import (
    GroupStructure,
    PointFamily,
    compatibility_check,
    convolution_norm,
    dual_norm_from_point_family,
    dual_sup_norm,
    gso_lower_bound,
    norm_from_point_family,
)

__version__ = "0.1.0"
