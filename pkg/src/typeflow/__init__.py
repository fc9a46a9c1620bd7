"""Type-graph density exponents, minimum-KL couplings, and the exponent
surfaces built on them, with brute-force oracles at tiny blocklength."""

from .probcore import (
    CondKernel,
    Dist,
    JointDist,
    JointNType,
    cond_kl,
    csiszar_sandwich,
    entropy,
    enumerate_joint_types_with_marginals,
    enumerate_ntypes,
    info_measures,
    kl_div,
    type_class_count,
)
from .typegraph import (
    DensityReport,
    SizeBudgetError,
    TypeGraph,
    achievability_code,
    biclique_points_n,
    build_graph,
    exponent_n,
    gamma_directed,
    gamma_n,
    independent_set_points_n,
    upsilon_n,
)
from .singleletter import (
    SingleLetterSolver,
    biclique_region_star,
    e_star,
    f_star,
    g_star,
    hk_region_member,
    lemma2_harness,
    triangle_condition,
    upsilon_star,
)
from .coupling import (
    CouplingProblem,
    ExponentSurface,
    MinKLResult,
    lower_convex_envelope,
    marginal_continuity_check,
    min_kl_coupling,
    phi,
    psi,
    surface_from_function,
    theta_lower_star,
    theta_upper_star,
    upper_concave_envelope,
)
from .dsbs import DsbsParams, bac_r2_max, dd, p_star, phi_psi_dsbs, prop4_bounds
from .hyper import ConeModel, HolderPair, lambda_lower, lambda_upper, region_member
from .exchange import SubspacePair, exchange_partition, laplace_certificate

__version__ = "0.1.0"
