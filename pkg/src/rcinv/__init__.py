"""Robust controlled invariant sets of linear systems with polytope-union constraints."""

from .controller import Trajectory, admissible_inputs, select_input, simulate
from .errors import (
    CertificateError,
    DegenerateError,
    EmptySetError,
    EpsilonExceeded,
    HorizonTooShortError,
    InputError,
    InvarianceViolation,
    NumericError,
    RcinvError,
    ResourceError,
    UnboundedError,
)
from .invariance import (
    ConstraintSpec,
    InnerResult,
    IterationTrace,
    SystemModel,
    check_rci,
    inner_approximation,
    iterate_inner,
    iterate_outer,
    pre_rho,
)
from .lp import DEFAULT_TOL, LpProblem, LpResult, ToleranceConfig, chebyshev, solve_lp
from .nullctrl import (
    NullLadder,
    OuterResult,
    assemble_outer,
    constant_c,
    null_ladder,
    outer_approximation,
    rho_for_epsilon,
)
from .polytope import (
    HPolytope,
    box,
    canonicalize,
    convex_subset,
    erode_convex,
    intersect,
    minkowski_sum,
    project_eliminate,
    unit_ball,
    vertices_2d,
)
from .region import (
    PolyUnion,
    erode_union,
    gap_epsilon,
    hausdorff_gap,
    inflate,
    intersect_unions,
    is_subset,
    region_diff,
    set_equal,
)

__version__ = "0.1.0"
