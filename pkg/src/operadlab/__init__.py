"""Exact machinery for braided tree operads acting on configuration-space
expansions: labeled binary trees and their word calculus, braid groups with
decidable equality, tree-indexed charts with exact log-Puiseux expansions,
monodromy transforms, and a regular-singular (Euler-form) series solver.
"""

from .coeff import Coefficient, Cyclotomic, numeric_value
from .series import LogPuiseuxSeries, binomial, series_arith
from .tree import (
    Tree,
    TreeAnalysis,
    TreeError,
    alpha_sites,
    alpha_target,
    alpha_target_at_vertex,
    analyze,
    compose,
    decompose,
    parse_tree,
    sigma_target,
)
from .braid import (
    BraidError,
    BraidWord,
    PaBMorphism,
    Permutation,
    alpha_morphism,
    artin_equal,
    braid_cable,
    coherence_check,
    pab_compose,
    perm_compose,
    project_to_perm,
    sigma_morphism,
    tree_perm,
)
from .configspace import (
    AdmissibilityCertificate,
    BasePoint,
    CoordinateSystem,
    DegreeResult,
    RationalFunction,
    admissible,
    base_point,
    build_coordinates,
    degree,
    edge_var,
    expand,
    expand_log,
)
from .transform import (
    ContinuationResult,
    PathSpec,
    TransformError,
    alpha_overlap_point,
    alpha_reexpand,
    alpha_substitute,
    continue_along_path,
    double_twist,
    sigma_transform,
)
from .frobenius import (
    EulerOperator,
    FrobeniusError,
    FrobeniusSolution,
    IndicialData,
    ResonanceError,
    best_radius_bound,
    radius_bound,
    solve,
    verify_residual,
)

__version__ = "0.1.0"
