"""Radial curves rho_eps(theta) = rho0 + eps * rho1(theta) and their ovals.

rho1 is a trigonometric polynomial given by one-sided complex coefficients:
rho1(theta) = Re sum_j a_j exp(i j theta), j >= 0.  Negative input modes are
folded onto the positive side via conjugation, which leaves the real part
unchanged.  A curve qualifies as an oval once its geodesic curvature is
certified positive on a dense grid (validate_oval); the billiard layer only
accepts certified ovals.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import DegenerateError, DomainError, NotConvexError
from .surfaces import (
    TWO_PI,
    Surface,
    ambient_inner,
    in_surface_normal,
    tangent_norm,
)

# Grid on which positivity / hemisphere bounds / convexity are certified.
VALIDATION_GRID = 4096
# Upper bound for rho_eps on the sphere: ovals stay in the open hemisphere.
SPHERE_RHO_MAX = np.pi / 2
# Tangent speeds below this are treated as degenerate.
SPEED_FLOOR = 1e-12


def _normalize_coeffs(coeffs) -> tuple:
    """Canonical one-sided coefficient tuple ((j, a_j), ...), j >= 0 sorted."""
    if coeffs is None:
        return ()
    items = coeffs.items() if isinstance(coeffs, dict) else coeffs
    acc: dict[int, complex] = {}
    for j, c in items:
        j = int(j)
        c = complex(c)
        if j < 0:
            j, c = -j, c.conjugate()
        acc[j] = acc.get(j, 0.0 + 0.0j) + c
    if 0 in acc:
        acc[0] = complex(acc[0].real, 0.0)
    return tuple(sorted((j, c) for j, c in acc.items() if c != 0))


@dataclass(frozen=True)
class RadialCurve:
    """A star-shaped curve about the pole, rho_eps(theta) = rho0 + eps*rho1."""

    surface: Surface
    rho0: float
    coeffs: tuple = ()
    epsilon: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "surface", Surface.from_name(self.surface))
        object.__setattr__(self, "rho0", float(self.rho0))
        object.__setattr__(self, "epsilon", float(self.epsilon))
        object.__setattr__(self, "coeffs", _normalize_coeffs(self.coeffs))
        if not self.rho0 > 0.0:
            raise DomainError("RadialCurve: rho0 must be positive")
        grid = np.linspace(0.0, TWO_PI, VALIDATION_GRID, endpoint=False)
        r = self.radius(grid)
        if np.any(r <= 0.0):
            raise DomainError(
                "RadialCurve: rho_eps(theta) must stay positive "
                f"(min {float(r.min()):.6g})"
            )
        if self.surface is Surface.SPHERE and np.any(r >= SPHERE_RHO_MAX):
            raise DomainError(
                "RadialCurve: spherical ovals must stay inside the open "
                f"hemisphere, rho_eps < pi/2 (max {float(r.max()):.6g})"
            )

    # -- scalar profile ----------------------------------------------------

    def rho1(self, theta, order: int = 0):
        """rho1 and its theta-derivatives: Re sum (i j)^order a_j e^{i j theta}."""
        theta = np.asarray(theta, dtype=float)
        out = np.zeros(theta.shape)
        for j, a in self.coeffs:
            z = (1j * j) ** order * a
            if z == 0:
                continue
            jt = j * theta
            out += z.real * np.cos(jt) - z.imag * np.sin(jt)
        return out

    def radius(self, theta, order: int = 0):
        """rho_eps and its theta-derivatives."""
        if order == 0:
            return self.rho0 + self.epsilon * self.rho1(theta)
        return self.epsilon * self.rho1(theta, order)

    # -- structure ---------------------------------------------------------

    @property
    def is_circle(self) -> bool:
        return self.epsilon == 0.0 or not self.coeffs

    @property
    def modes(self) -> tuple:
        """Positive mode numbers carried by rho1."""
        return tuple(j for j, _ in self.coeffs if j > 0)

    def two_sided_coefficient(self, j: int) -> complex:
        """Coefficient of e^{i j theta} in the two-sided expansion of rho1."""
        stored = dict(self.coeffs)
        if j == 0:
            return stored.get(0, 0.0 + 0.0j)
        a = stored.get(abs(j), 0.0 + 0.0j)
        half = 0.5 * a
        return half if j > 0 else half.conjugate()

    def with_epsilon(self, epsilon: float) -> "RadialCurve":
        return replace(self, epsilon=float(epsilon))


def curve_eval(curve: RadialCurve, theta, order: int = 0):
    """Embedded curve point and derivatives with respect to theta.

    Returns the point for order 0, (point, d1) for order 1 and
    (point, d1, d2) for order 2; everything broadcasts over theta.
    """
    theta = np.asarray(theta, dtype=float)
    r = curve.radius(theta)
    ct, st = np.cos(theta), np.sin(theta)
    sn, cs = _profile_functions(curve.surface, r)
    u, z = sn[0], cs[0]
    point = np.stack(np.broadcast_arrays(u * ct, u * st, z + 0.0 * u), axis=-1)
    if order == 0:
        return point
    r1 = curve.radius(theta, 1)
    u1 = sn[1] * r1
    z1 = cs[1] * r1
    d1 = np.stack(
        np.broadcast_arrays(u1 * ct - u * st, u1 * st + u * ct, z1 + 0.0 * u),
        axis=-1,
    )
    if order == 1:
        return point, d1
    if order != 2:
        raise ValueError("curve_eval: order must be 0, 1 or 2")
    r2 = curve.radius(theta, 2)
    u2 = sn[2] * r1 * r1 + sn[1] * r2
    z2 = cs[2] * r1 * r1 + cs[1] * r2
    d2 = np.stack(
        np.broadcast_arrays(
            (u2 - u) * ct - 2.0 * u1 * st,
            (u2 - u) * st + 2.0 * u1 * ct,
            z2 + 0.0 * u,
        ),
        axis=-1,
    )
    return point, d1, d2


def _profile_functions(surface: Surface, r):
    """(sn, sn', sn'') and (z, z', z'') for the embedding profile at radius r."""
    if surface is Surface.EUCLIDEAN:
        one = np.ones_like(r)
        zero = np.zeros_like(r)
        return (r, one, zero), (one, zero, zero)
    if surface is Surface.SPHERE:
        s, c = np.sin(r), np.cos(r)
        return (s, c, -s), (c, -s, -c)
    sh, ch = np.sinh(r), np.cosh(r)
    return (sh, ch, sh), (ch, sh, ch)


def curve_speed(curve: RadialCurve, theta):
    """Metric length of dGamma/dtheta."""
    _, d1 = curve_eval(curve, theta, order=1)
    return tangent_norm(d1, curve.surface)


def geodesic_curvature(curve: RadialCurve, theta):
    """Geodesic curvature, positive when the curve bends towards the pole.

    Computed as the in-surface normal component of the ambient acceleration
    divided by the squared speed; the normal is the +90-degree rotation of
    the velocity, which points inward for radial curves.
    """
    point, d1, d2 = curve_eval(curve, theta, order=2)
    speed = tangent_norm(d1, curve.surface)
    if np.any(speed < SPEED_FLOOR):
        raise DegenerateError("geodesic_curvature: vanishing tangent speed")
    unit_t = d1 / speed[..., None]
    normal = in_surface_normal(point, unit_t, curve.surface)
    return ambient_inner(d2, normal, curve.surface) / (speed * speed)


@dataclass(frozen=True)
class Oval:
    """A radial curve certified geodesically convex on a dense grid."""

    curve: RadialCurve
    curvature_margin: float
    grid: int

    @property
    def surface(self) -> Surface:
        return self.curve.surface


def validate_oval(curve: RadialCurve, grid: int = VALIDATION_GRID) -> Oval:
    """Certify positivity, chart bounds and positive geodesic curvature.

    The checks run on `grid` equispaced parameters (grid >= 256).  Returns
    the certified Oval carrying the worst-case curvature margin.
    """
    if grid < 256:
        raise ValueError("validate_oval: grid must be at least 256")
    thetas = np.linspace(0.0, TWO_PI, int(grid), endpoint=False)
    r = curve.radius(thetas)
    if np.any(r <= 0.0):
        k = int(np.argmin(r))
        raise DomainError(
            f"validate_oval: rho_eps({thetas[k]:.6g}) = {float(r[k]):.6g} <= 0"
        )
    if curve.surface is Surface.SPHERE and np.any(r >= SPHERE_RHO_MAX):
        k = int(np.argmax(r))
        raise DomainError(
            f"validate_oval: rho_eps({thetas[k]:.6g}) = {float(r[k]):.6g} "
            "leaves the open hemisphere"
        )
    kappa = geodesic_curvature(curve, thetas)
    margin = float(kappa.min())
    if margin <= 0.0:
        k = int(np.argmin(kappa))
        raise NotConvexError(
            f"validate_oval: geodesic curvature {margin:.6g} <= 0 "
            f"at theta = {thetas[k]:.6g}",
            theta=float(thetas[k]),
            curvature=margin,
        )
    return Oval(curve=curve, curvature_margin=margin, grid=int(grid))


def circle_oval(surface: Surface, rho0: float) -> Oval:
    """Convenience: the certified unperturbed circle of radius rho0."""
    return validate_oval(RadialCurve(surface=surface, rho0=rho0))
