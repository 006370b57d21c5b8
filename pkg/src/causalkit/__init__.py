"""causalkit: numerical causal geometry on flat-torus slices.

Standard-form spacetimes with sampled lapse and spatial metric, optical
balls by anisotropic fast marching, Cauchy developments by monotone
level-set propagation, regular pair preorders with computed light-speed
windows, interpolating deformations between metrics, and a rule calculus
for upper bounds on splitting distances.
"""

__version__ = "0.1.0"

from .grid import SpatialGrid
from .geometry import (
    StandardSpacetime,
    cone_contained,
    cone_margin,
    from_expressions,
    minkowski,
    optical_metric,
    ultrastatic,
)
from .fieldexpr import parse_field_expression
from .regions import (
    Margin,
    Region,
    annulus,
    ball,
    box,
    containment_margin,
    contains,
    dilate,
    hausdorff,
    optical_ball,
    optical_distance,
    optical_erode,
    redistance,
    union_of,
)
from .causal import DevelopmentField, develop, slice_contained
from .pairs import (
    CauchyPair,
    MorphismSpec,
    is_regular,
    lightspeed_epsilon,
    linear_map,
    precedes,
    slab_inclusion,
    step_pairs,
    transport_pair,
    verify_lightspeed,
)
from .deform import (
    CauchyChain,
    InterpolationTimes,
    interpolate,
    verify_interpolation,
    verify_theorem_chain,
)
from .distal import (
    DistanceModel,
    RadialBump,
    apply_diffeo_bound,
    apply_easydistal,
    bisection_iterate,
    bisection_refine,
    build_radial_bump,
    distal_metric,
    inflation_profile,
    radial_diffeo,
)

__all__ = [
    "SpatialGrid",
    "StandardSpacetime",
    "Region",
    "Margin",
    "CauchyPair",
    "MorphismSpec",
    "DevelopmentField",
    "DistanceModel",
    "RadialBump",
    "InterpolationTimes",
    "CauchyChain",
    "annulus",
    "apply_diffeo_bound",
    "apply_easydistal",
    "ball",
    "bisection_iterate",
    "bisection_refine",
    "box",
    "build_radial_bump",
    "cone_contained",
    "cone_margin",
    "containment_margin",
    "contains",
    "develop",
    "dilate",
    "distal_metric",
    "from_expressions",
    "hausdorff",
    "inflation_profile",
    "interpolate",
    "is_regular",
    "lightspeed_epsilon",
    "linear_map",
    "minkowski",
    "optical_ball",
    "optical_distance",
    "optical_erode",
    "optical_metric",
    "parse_field_expression",
    "precedes",
    "radial_diffeo",
    "redistance",
    "slab_inclusion",
    "slice_contained",
    "step_pairs",
    "transport_pair",
    "ultrastatic",
    "union_of",
    "verify_interpolation",
    "verify_lightspeed",
    "verify_theorem_chain",
]
