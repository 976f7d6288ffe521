"""Billiards in convex ovals on constant-curvature surfaces.

Geometry of the three embedded models, the generic billiard map, closed
forms for circular billiards, and the subharmonic Melnikov machinery that
decides whether a resonant invariant circle survives a radial perturbation
at first order.
"""

from .billiard import (
    BilliardState,
    LiftedOrbit,
    MomentumState,
    billiard_step,
    circular_alpha,
    circular_step,
    generating_function,
    iterate,
    iterate_many,
    momentum_of,
    momentum_values,
    psi_from_momentum,
    rotation_number,
)
from .curves import (
    Oval,
    RadialCurve,
    circle_oval,
    curve_eval,
    curve_speed,
    geodesic_curvature,
    validate_oval,
)
from .errors import (
    BaseMismatchError,
    BilliardError,
    CoincidenceError,
    ConfigError,
    ContinuationError,
    ConvexityError,
    DegenerateError,
    DomainError,
    NoSolutionError,
    NotConvexError,
    OrderTestFailure,
    ResonanceMismatchError,
    RootFindError,
    TangencyError,
    TooShortError,
)
from .melnikov import (
    FirstOrderReport,
    MelnikovResult,
    Resonance,
    SubharmonicPotentialSamples,
    Verdict,
    breakup_verdict,
    continue_invariant_radial,
    find_resonance,
    first_order_check,
    melnikov_constant,
    melnikov_potential,
    resonant_sum,
    sampled_fourier,
    spectral_derivative,
    subharmonic_potential,
)
from .surfaces import (
    Surface,
    Tangent,
    ambient_inner,
    angle_between,
    embed,
    geodesic_distance,
    geodesic_flow,
    geodesic_point,
    in_surface_normal,
    on_surface,
    polar_coordinates,
    project_to_tangent,
    ray_plane_normal,
    tangent_angle,
    tangent_norm,
)

__version__ = "0.1.0"
