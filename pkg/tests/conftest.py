"""Shared helpers: canonical surface cases, random ovals, independent frames.

The frame helpers below are written from the closed-form embeddings directly
(not through the package) so tests that use them cross-check the library
against an independent formulation.
"""

from __future__ import annotations

import math

import numpy as np

from geobilliards import RadialCurve, Surface, validate_oval
from geobilliards.errors import BilliardError

# One representative radius per surface, used throughout the suite.
SURFACE_CASES = (
    (Surface.EUCLIDEAN, 1.0),
    (Surface.SPHERE, 0.8),
    (Surface.HYPERBOLIC, 1.0),
)

# Largest rho used when drawing random points (sphere stays inside the
# open hemisphere with room to spare).
RHO_MAX = {
    Surface.EUCLIDEAN: 2.5,
    Surface.SPHERE: 1.4,
    Surface.HYPERBOLIC: 2.2,
}


def random_coeffs(rng, max_mode: int = 4, terms: int = 2):
    """A few random complex Fourier coefficients on distinct positive modes."""
    modes = rng.choice(np.arange(1, max_mode + 1), size=terms, replace=False)
    return [(int(j), complex(rng.normal(), rng.normal())) for j in modes]


def random_oval(surface, rho0, rng, epsilon: float = 0.02, max_mode: int = 4):
    """A random validated oval; epsilon is halved until validation passes."""
    coeffs = random_coeffs(rng, max_mode=max_mode)
    eps = float(epsilon)
    for _ in range(12):
        try:
            return validate_oval(
                RadialCurve(surface=surface, rho0=rho0, coeffs=coeffs, epsilon=eps)
            )
        except BilliardError:
            eps *= 0.5
    raise RuntimeError("random_oval: could not certify an oval")


def polar_frame(rho: float, theta: float, surface: Surface):
    """Point and orthonormal frame (e_rho, e_theta) from the raw embeddings.

    e_theta = (-sin theta, cos theta, 0) is metrically unit on all three
    surfaces; e_rho is the rho-derivative of the embedding, also unit.
    """
    ct, st = math.cos(theta), math.sin(theta)
    if surface is Surface.EUCLIDEAN:
        point = np.array([rho * ct, rho * st, 1.0])
        e_rho = np.array([ct, st, 0.0])
    elif surface is Surface.SPHERE:
        point = np.array([math.sin(rho) * ct, math.sin(rho) * st, math.cos(rho)])
        e_rho = np.array([math.cos(rho) * ct, math.cos(rho) * st, -math.sin(rho)])
    else:
        point = np.array([math.sinh(rho) * ct, math.sinh(rho) * st, math.cosh(rho)])
        e_rho = np.array([math.cosh(rho) * ct, math.cosh(rho) * st, math.sinh(rho)])
    e_theta = np.array([-st, ct, 0.0])
    return point, e_rho, e_theta


def random_point_and_tangent(surface, rng, rho_min: float = 0.2):
    """Random surface point and a random unit tangent vector there."""
    rho = float(rng.uniform(rho_min, RHO_MAX[surface]))
    theta = float(rng.uniform(0.0, 2.0 * math.pi))
    point, e_rho, e_theta = polar_frame(rho, theta, surface)
    a = float(rng.uniform(0.0, 2.0 * math.pi))
    return point, math.cos(a) * e_rho + math.sin(a) * e_theta
