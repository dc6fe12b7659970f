"""Dynamics of the meromorphic family f(z) = lam + tan(z**2)."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    AsymptoticValueNoPreimage,
    BranchUndefined,
    DomainError,
    NonConvergence,
    NotCantorParameter,
    OrbitEnteredFatouNeighborhood,
    PoleProximityError,
    RegionBoundaryError,
    TanlabError,
)
from .inverse import BranchIndex, branch_inverse, pole_preimage, principal_inverse, region_index  # noqa: E402
from .mapcore import (  # noqa: E402
    INFINITY,
    MapParameter,
    derivative,
    evaluate,
    pole_point,
    singular_values,
    zero_point,
)
from .orbit import (  # noqa: E402
    CycleInfo,
    OrbitResult,
    OrbitStatus,
    classify_cycle,
    count_real_fixed_points_principal,
    is_prepole,
    iterate_orbit,
    refine_cycle,
    singular_orbit_fate,
    tangency_parameter,
)
from .symbolic import (  # noqa: E402
    ItineraryWord,
    cylinder_point,
    itinerary,
    sequence_distance,
    shift,
    verify_conjugacy,
)
