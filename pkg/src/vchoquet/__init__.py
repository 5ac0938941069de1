"""Choquet-order tools for vector measures with values in finite-dimensional dual spaces."""
from .geometry import (
    WHOLE_SPHERE,
    DimensionError,
    Face,
    GeometryError,
    Space,
    dual_ball_extreme_points,
    dual_norm,
    facets,
    is_simplexoid_dual,
    is_strictly_convex_dual,
    minimal_face,
    primal_norm,
)
from .lp import LinearProgram, LpOutcome, Status, feasible_point, solve
from .measures import (
    AtomicMeasure,
    DisintegrationKernel,
    MeasureError,
    ProbabilityAtoms,
    VectorMeasure,
    barycenter,
    disintegrate,
    integrate,
    mass,
    pair,
    recompose,
    total_variation,
)
from .ordering import (
    ConvexPL,
    DilationWitness,
    HypothesisError,
    choquet_leq,
    enumerate_minimal,
    is_maximal,
    is_minimal,
    maximalize,
    minimalize,
    mokobodzki_maximal,
    prec_b,
    prec_d,
    sublinear_order_test,
    upper_envelope_at,
)
from .suites import verify
from .transfer import DFunction, density_h, eval_pf, hustad, is_in_N, tilde, transfer_K, variation_density

__version__ = "0.1.0"
