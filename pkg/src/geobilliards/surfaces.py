"""Embedded models of the three constant-curvature surfaces.

The Euclidean plane sits at z = 1 in R^3; the sphere is the unit sphere
x^2 + y^2 + z^2 = 1 (ovals live in its upper hemisphere); the hyperbolic
plane is the upper sheet of x^2 + y^2 - z^2 = -1 in Minkowski R^{2,1} with
inner product u1*v1 + u2*v2 - u3*v3.  Working in the ambient embedding keeps
everything in closed form: geodesics are the sections of the surface by
planes through the origin, distances come from a single inner product, and
geodesic flow is linear in (P, v) with circular/hyperbolic rotation
coefficients.

All functions broadcast over leading axes; points and vectors occupy the
last axis (length 3).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import BaseMismatchError, DegenerateError, DomainError

TWO_PI = 2.0 * np.pi

# Quadric residual accepted for "this point lies on the surface".
ON_SURFACE_TOL = 1e-12
# arccos/arccosh arguments may drift this far outside their domain before we
# refuse to clamp them (roundoff allowance, everything else is a real error).
ARC_CLAMP_BAND = 1e-9
# Below this (relative) cross-product magnitude a plane normal is meaningless.
DEGENERATE_TOL = 1e-12


class Surface(Enum):
    """Which constant-curvature model a computation lives on."""

    EUCLIDEAN = "euclidean"
    SPHERE = "sphere"
    HYPERBOLIC = "hyperbolic"

    @classmethod
    def from_name(cls, name) -> "Surface":
        """Accept a Surface or one of the strings euclidean|sphere|hyperbolic."""
        if isinstance(name, Surface):
            return name
        try:
            return cls(str(name).strip().lower())
        except ValueError:
            raise DomainError(
                f"unknown surface {name!r}; expected one of "
                "'euclidean', 'sphere', 'hyperbolic'"
            ) from None


def ambient_inner(u, v, surface: Surface):
    """Ambient inner product: Euclidean dot, or signature (+, +, -) on H^2."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    out = u[..., 0] * v[..., 0] + u[..., 1] * v[..., 1]
    if surface is Surface.HYPERBOLIC:
        return out - u[..., 2] * v[..., 2]
    return out + u[..., 2] * v[..., 2]


def tangent_norm(v, surface: Surface):
    """Metric length of a tangent vector.

    On the hyperboloid tangent vectors are spacelike, so the Minkowski
    square is nonnegative up to roundoff; it is clipped at zero.
    """
    q = ambient_inner(v, v, surface)
    return np.sqrt(np.maximum(q, 0.0))


def embed(rho, theta, surface: Surface):
    """Map geodesic polar coordinates (rho, theta) about the pole to R^3.

    The pole is (0, 0, 1) on every surface.  rho must be nonnegative and,
    on the sphere, below pi (the polar chart's reach).
    """
    rho = np.asarray(rho, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if np.any(rho < 0.0):
        raise DomainError("embed: rho must be nonnegative")
    ct, st = np.cos(theta), np.sin(theta)
    if surface is Surface.EUCLIDEAN:
        radial, height = rho, np.ones_like(rho * theta)
    elif surface is Surface.SPHERE:
        if np.any(rho >= np.pi):
            raise DomainError("embed: sphere polar chart requires rho < pi")
        radial, height = np.sin(rho), np.cos(rho)
    else:
        radial, height = np.sinh(rho), np.cosh(rho)
    x = radial * ct
    y = radial * st
    return np.stack(np.broadcast_arrays(x, y, height + 0.0 * x), axis=-1)


def polar_coordinates(point, surface: Surface):
    """Inverse of embed: (rho, theta) with theta in [0, 2pi)."""
    point = np.asarray(point, dtype=float)
    x, y, z = point[..., 0], point[..., 1], point[..., 2]
    if surface is Surface.EUCLIDEAN:
        rho = np.hypot(x, y)
    elif surface is Surface.SPHERE:
        rho = np.arccos(_clamped(z, -1.0, 1.0, "polar_coordinates"))
    else:
        rho = np.arccosh(_clamped(z, 1.0, np.inf, "polar_coordinates"))
    theta = np.mod(np.arctan2(y, x), TWO_PI)
    return rho, theta


def on_surface(point, surface: Surface, tol: float = ON_SURFACE_TOL):
    """True where the quadric constraint of the model holds to tol."""
    point = np.asarray(point, dtype=float)
    if surface is Surface.EUCLIDEAN:
        return np.abs(point[..., 2] - 1.0) <= tol
    if surface is Surface.SPHERE:
        return np.abs(ambient_inner(point, point, surface) - 1.0) <= tol
    ok = np.abs(ambient_inner(point, point, surface) + 1.0) <= tol
    return ok & (point[..., 2] >= 1.0 - tol)


def project_to_tangent(point, v, surface: Surface):
    """Project an ambient vector onto the tangent plane at a surface point."""
    point = np.asarray(point, dtype=float)
    v = np.asarray(v, dtype=float)
    if surface is Surface.EUCLIDEAN:
        out = v.copy()
        out[..., 2] = 0.0
        return out
    coeff = ambient_inner(v, point, surface)
    if surface is Surface.SPHERE:
        return v - coeff[..., None] * point
    # <<P, P>> = -1, so the normal component is -<<v, P>> P.
    return v + coeff[..., None] * point


def _clamped(x, lo, hi, op: str):
    """Clamp into [lo, hi], refusing drifts beyond ARC_CLAMP_BAND."""
    x = np.asarray(x, dtype=float)
    if np.any(x < lo - ARC_CLAMP_BAND) or np.any(x > hi + ARC_CLAMP_BAND):
        bad = x[(x < lo - ARC_CLAMP_BAND) | (x > hi + ARC_CLAMP_BAND)]
        raise DomainError(
            f"{op}: argument {float(np.ravel(bad)[0]):.17g} outside "
            f"[{lo}, {hi}] by more than {ARC_CLAMP_BAND}"
        )
    return np.clip(x, lo, hi)


def geodesic_distance(X, Y, surface: Surface):
    """Geodesic distance between two points of the same surface."""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if surface is Surface.EUCLIDEAN:
        d = X - Y
        return np.sqrt(np.sum(d * d, axis=-1))
    if surface is Surface.SPHERE:
        return np.arccos(
            _clamped(ambient_inner(X, Y, surface), -1.0, 1.0, "geodesic_distance")
        )
    return np.arccosh(
        _clamped(-ambient_inner(X, Y, surface), 1.0, np.inf, "geodesic_distance")
    )


def geodesic_flow(P, v, s, surface: Surface):
    """Point and unit velocity after flowing arclength s from (P, v).

    v must be a unit tangent vector at P.  Closed forms: P + s v on the
    plane, circular rotation of (P, v) on the sphere, hyperbolic rotation
    on the hyperboloid.
    """
    P = np.asarray(P, dtype=float)
    v = np.asarray(v, dtype=float)
    s = np.asarray(s, dtype=float)[..., None]
    if surface is Surface.EUCLIDEAN:
        point = P + s * v
        return point, np.broadcast_to(v, point.shape).copy()
    if surface is Surface.SPHERE:
        c, sn = np.cos(s), np.sin(s)
        return c * P + sn * v, -sn * P + c * v
    ch, sh = np.cosh(s), np.sinh(s)
    return ch * P + sh * v, sh * P + ch * v


def geodesic_point(P, v, s, surface: Surface):
    """Point at arclength s along the geodesic leaving P with unit velocity v."""
    return geodesic_flow(P, v, s, surface)[0]


def _cross(u, v):
    """Euclidean cross product over the last axis (leaner than np.cross)."""
    out = np.empty(np.broadcast_shapes(u.shape, v.shape))
    out[..., 0] = u[..., 1] * v[..., 2] - u[..., 2] * v[..., 1]
    out[..., 1] = u[..., 2] * v[..., 0] - u[..., 0] * v[..., 2]
    out[..., 2] = u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]
    return out


def ray_plane_normal(P, v, surface: Surface):
    """Normal of the plane through the origin containing the geodesic (P, v).

    Every point of the geodesic satisfies ambient_inner(point, normal) = 0.
    On the hyperboloid the Euclidean cross product is pushed through the
    metric (z-component negated) so that orthogonality holds in the
    Minkowski product.  The normal is returned with unit Euclidean length.
    """
    P = np.asarray(P, dtype=float)
    v = np.asarray(v, dtype=float)
    n = _cross(P, v)
    scale = np.linalg.norm(P, axis=-1) * np.linalg.norm(v, axis=-1)
    nn = np.linalg.norm(n, axis=-1)
    if np.any(nn <= DEGENERATE_TOL * np.maximum(scale, 1.0)):
        raise DegenerateError(
            "ray_plane_normal: point and direction are linearly dependent"
        )
    if surface is Surface.HYPERBOLIC:
        n = n.copy()
        n[..., 2] = -n[..., 2]
        nn = np.linalg.norm(n, axis=-1)
    return n / nn[..., None]


def in_surface_normal(P, t, surface: Surface):
    """Unit tangent at P orthogonal to t, rotated +90 degrees from t.

    For the velocity of a radial curve traversed with increasing theta this
    is the inward side (towards the pole), which makes circles positively
    curved.
    """
    t = np.asarray(t, dtype=float)
    if surface is Surface.EUCLIDEAN:
        n = np.stack(
            np.broadcast_arrays(-t[..., 1], t[..., 0], 0.0 * t[..., 0]), axis=-1
        )
    else:
        n = _cross(np.asarray(P, dtype=float), t)
        if surface is Surface.HYPERBOLIC:
            n[..., 2] = -n[..., 2]
    length = tangent_norm(n, surface)
    if np.any(length <= DEGENERATE_TOL):
        raise DegenerateError("in_surface_normal: zero tangent")
    return n / length[..., None]


def angle_between(u, w, surface: Surface):
    """Angle in [0, pi] between unit tangent vectors at a common point."""
    return np.arccos(
        _clamped(ambient_inner(u, w, surface), -1.0, 1.0, "angle_between")
    )


@dataclass(frozen=True)
class Tangent:
    """A tangent vector with its base point pinned down."""

    base: np.ndarray
    vec: np.ndarray
    surface: Surface

    def unit(self) -> "Tangent":
        length = float(tangent_norm(self.vec, self.surface))
        if length <= DEGENERATE_TOL:
            raise DegenerateError("Tangent.unit: zero vector")
        return Tangent(self.base, np.asarray(self.vec, dtype=float) / length, self.surface)


def tangent_angle(t: Tangent, w: Tangent):
    """Angle between two unit tangent vectors based at the same point."""
    if t.surface is not w.surface:
        raise BaseMismatchError("tangent_angle: vectors live on different surfaces")
    if not np.allclose(t.base, w.base, rtol=0.0, atol=1e-12):
        raise BaseMismatchError("tangent_angle: vectors based at different points")
    return float(angle_between(t.vec, w.vec, t.surface))
