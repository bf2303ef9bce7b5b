"""Iterated balanced refinements of set-valued maps on finite pseudometric
spaces: core certification, Lipschitz selections via Steiner points, and
property checks for the supporting planar convex geometry."""

from .errors import (
    CertificationError,
    CorefineError,
    GeometryError,
    IndeterminateError,
    MalformedInputError,
    PreconditionError,
)
from .geometry import (
    ConvexBody,
    PolygonalNorm,
    contains,
    directed_gap,
    gauge_distance,
    hausdorff,
    intersect,
    minkowski_add_ball,
    minkowski_sum,
    point_body,
    rectangular_hull,
    separation,
    steiner_point,
    support,
)
from .lowdim import (
    Interval,
    interval_core_check,
    interval_refinement,
    segment_instance_adapter,
)
from .metricspace import (
    PseudometricSpace,
    WeightedTree,
    metric_closure,
    scale,
    subsets_up_to,
    tree_metric,
    validate,
)
from .refine import (
    RefinementSchedule,
    SetValuedMap,
    balanced_refinement,
    find_empty_witness,
    iterate,
    orbit_set,
    segment_orbit_set,
    stabilization_check,
)
from .selection import Selection, lipschitz_seminorm, steiner_selection
from .tolerances import EPS_CHECK, EPS_GEOM
from .verify import (
    CoreCertificate,
    FeasibilityResult,
    HypothesisResult,
    ball_body,
    certify_core,
    check_hypothesis,
    check_neighborhood_inclusion,
    check_triple_inclusion,
    modulus_of_squareness,
    neighborhood_counterexample_depth,
    neighborhood_inflation,
    phi_bound,
    psi_euclidean,
    subset_feasible,
)

__version__ = "0.1.0"
