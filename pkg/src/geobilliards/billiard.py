"""The billiard map inside a convex oval on a constant-curvature surface.

A state is an impact parameter theta plus the angle psi in (0, pi) between
the outgoing geodesic chord and the forward tangent of the boundary.  One
generic step:

1. build the orthonormal frame (tangent T, inward normal n) at Gamma(theta)
   and the outgoing unit direction w = cos(psi) T + sin(psi) n;
2. the chord lies in the plane through the origin spanned by the base point
   and w, so the next impact is the second zero of
   F(phi) = ambient_inner(Gamma(phi), plane_normal), located by a sign scan
   over 720 cells of (theta, theta + 2pi) followed by bracketed bisection;
3. transport w along the geodesic to the impact and measure the reflected
   angle against the forward tangent there (elastic reflection preserves
   the tangential component and flips the normal one, so the new psi is the
   angle between the arrival direction and the forward tangent).

Everything below is vectorized over a batch of states; the public
billiard_step is the batch-of-one case.  The closed-form circular map
(circular_alpha / circular_step) is an independent code path used to
cross-validate the generic stepper on unperturbed circles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curves import Oval, RadialCurve, curve_eval, curve_speed
from .errors import (
    CoincidenceError,
    ConvexityError,
    DomainError,
    RootFindError,
    TangencyError,
    TooShortError,
)
from .surfaces import (
    TWO_PI,
    Surface,
    ambient_inner,
    angle_between,
    geodesic_distance,
    geodesic_flow,
    in_surface_normal,
    ray_plane_normal,
    tangent_norm,
)

# Launch angles closer than this to 0 or pi are refused (grazing chords).
PSI_GUARD = 1e-6
# Width of the excluded window around the launch parameter; the trivial zero
# of F at theta itself lives there.
ROOT_EXCLUSION = 1e-7
# Sign-scan resolution over (theta, theta + 2pi).
SCAN_POINTS = 720
# Bisection sweeps: 2pi/720 / 2^48 ~ 3e-17, i.e. to the last float.
BISECT_ITERS = 48
# On circle boundaries the chord function has a cheap analytic derivative,
# so bisect only to ~8e-12 and let two Newton steps finish the job.
POLISH_BISECT_ITERS = 30
NEWTON_POLISH = 2
# Two refined roots closer than this collapse to one impact.
ROOT_MERGE = 1e-9

# Momentum orientation, pinned by the calibration y = -dg/dtheta0 against
# the generating function g = -distance (see test suite).  With it the
# momentum y = -speed * cos(psi) increases with psi and the twist
# d(theta1)/d(y0) is positive.
_MOMENTUM_ORIENTATION = -1.0

_OFFSETS = np.linspace(ROOT_EXCLUSION, TWO_PI - ROOT_EXCLUSION, SCAN_POINTS + 1)
_SCAN_COS = np.cos(_OFFSETS)
_SCAN_SIN = np.sin(_OFFSETS)


@dataclass(frozen=True)
class BilliardState:
    """Impact parameter theta (mod 2pi) and outgoing angle psi in (0, pi)."""

    theta: float
    psi: float

    def __post_init__(self):
        object.__setattr__(self, "theta", float(self.theta) % TWO_PI)
        object.__setattr__(self, "psi", float(self.psi))
        if not 0.0 < self.psi < math.pi:
            raise DomainError(
                f"BilliardState: psi = {self.psi:.6g} outside (0, pi)"
            )


@dataclass(frozen=True)
class MomentumState:
    """Twist-map coordinates (theta, y)."""

    theta: float
    y: float


@dataclass(frozen=True)
class LiftedOrbit:
    """Orbit samples with a continuous lift of the impact parameter."""

    theta: np.ndarray
    psi: np.ndarray
    lifted_theta: np.ndarray

    def __len__(self) -> int:
        return len(self.theta)

    def state(self, k: int) -> BilliardState:
        return BilliardState(theta=float(self.theta[k]), psi=float(self.psi[k]))


# ---------------------------------------------------------------------------
# generic step (batched)
# ---------------------------------------------------------------------------


def _chord_functions(curve: RadialCurve, theta, plane_n):
    """Evaluators of the chord function F(x) = ambient_inner(Gamma(theta+x), N).

    Returns (f_grid, f_line, fprime_line).  f_grid() scans the standard
    offset grid for the whole batch; f_line takes per-row offsets.  The
    metric sign of the ambient product is folded into the z-coefficient.
    On circle boundaries F reduces to A cos(x) + B sin(x) + c with per-row
    constants, so the scan reuses the precomputed offset tables and the
    analytic derivative is returned as fprime_line for Newton polishing.
    On perturbed ovals fprime_line is None and refinement is pure bisection.
    """
    surface = curve.surface
    n0 = np.ascontiguousarray(plane_n[:, 0])
    n1 = np.ascontiguousarray(plane_n[:, 1])
    nz = np.ascontiguousarray(plane_n[:, 2])
    if surface is Surface.HYPERBOLIC:
        nz = -nz

    if curve.is_circle:
        r = curve.rho0
        if surface is Surface.EUCLIDEAN:
            u, z = r, 1.0
        elif surface is Surface.SPHERE:
            u, z = math.sin(r), math.cos(r)
        else:
            u, z = math.sinh(r), math.cosh(r)
        a = n0 * u
        b = n1 * u
        c = nz * z
        ct = np.cos(theta)
        st = np.sin(theta)
        A = a * ct + b * st
        B = b * ct - a * st

        def f_grid():
            return A[:, None] * _SCAN_COS + B[:, None] * _SCAN_SIN + c[:, None]

        def f_line(x):
            return A * np.cos(x) + B * np.sin(x) + c

        def fprime_line(x):
            return B * np.cos(x) - A * np.sin(x)

        return f_grid, f_line, fprime_line

    def f_any(phi, m0, m1, mz):
        r = curve.radius(phi)
        if surface is Surface.EUCLIDEAN:
            u, z = r, 1.0
        elif surface is Surface.SPHERE:
            u, z = np.sin(r), np.cos(r)
        else:
            u, z = np.sinh(r), np.cosh(r)
        return m0 * (u * np.cos(phi)) + m1 * (u * np.sin(phi)) + mz * z

    def f_grid():
        return f_any(
            theta[:, None] + _OFFSETS, n0[:, None], n1[:, None], nz[:, None]
        )

    def f_line(x):
        return f_any(theta + x, n0, n1, nz)

    return f_grid, f_line, None


def _refine(f_line, fprime_line, lo, hi, lo_sign):
    """Root of F inside per-row brackets [lo, hi] with F(lo) of sign lo_sign.

    Bisection down to the target width; with an analytic derivative the
    final digits come from Newton steps clipped to the bracket.
    """
    iters = BISECT_ITERS if fprime_line is None else POLISH_BISECT_ITERS
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = f_line(mid)
        same = fm * lo_sign > 0.0
        lo = np.where(same, mid, lo)
        hi = np.where(same, hi, mid)
    x = 0.5 * (lo + hi)
    if fprime_line is not None:
        for _ in range(NEWTON_POLISH):
            fp = fprime_line(x)
            fp = np.where(fp == 0.0, np.inf, fp)
            x = np.clip(x - f_line(x) / fp, lo, hi)
    return x


def _step_arrays(curve: RadialCurve, theta, psi):
    """One generic bounce for a batch of states.

    Returns (advance, psi_next) with advance = next theta minus theta as a
    number in (0, 2pi); callers do their own wrapping / lifting.
    """
    theta = np.asarray(theta, dtype=float)
    psi = np.asarray(psi, dtype=float)
    if np.any((psi <= PSI_GUARD) | (psi >= math.pi - PSI_GUARD)):
        bad = float(psi[(psi <= PSI_GUARD) | (psi >= math.pi - PSI_GUARD)][0])
        raise TangencyError(
            f"billiard_step: psi = {bad:.6g} within {PSI_GUARD} of tangency"
        )
    surface = curve.surface

    point, d1 = curve_eval(curve, theta, order=1)
    speed = tangent_norm(d1, surface)
    unit_t = d1 / speed[:, None]
    normal = in_surface_normal(point, unit_t, surface)
    w = np.cos(psi)[:, None] * unit_t + np.sin(psi)[:, None] * normal
    plane_n = ray_plane_normal(point, w, surface)

    f_grid, f_line, fprime_line = _chord_functions(curve, theta, plane_n)
    fvals = f_grid()
    change = fvals[:, :-1] * fvals[:, 1:] < 0.0
    counts = change.sum(axis=1)
    exact = np.any(fvals == 0.0, axis=1)

    # Refine the first bracket of every row in lockstep; rows that did not
    # scan to exactly one clean crossing are redone one by one below.
    rows = np.arange(theta.shape[0])
    idx = np.argmax(change, axis=1)
    advance = _refine(
        f_line, fprime_line, _OFFSETS[idx], _OFFSETS[idx + 1], fvals[rows, idx]
    )
    for i in np.nonzero((counts != 1) | exact)[0]:
        _, f_line_i, fprime_i = _chord_functions(
            curve, theta[i : i + 1], plane_n[i : i + 1]
        )
        advance[i] = _resolve_row(
            f_line_i, fprime_i, fvals[i], change[i],
            float(theta[i]), float(psi[i]),
        )

    phi1 = theta + advance
    point1, d1_next = curve_eval(curve, phi1, order=1)
    speed1 = tangent_norm(d1_next, surface)
    unit_t1 = d1_next / speed1[:, None]
    chord = geodesic_distance(point, point1, surface)
    _, arrival = geodesic_flow(point, w, chord, surface)
    psi_next = angle_between(arrival, unit_t1, surface)
    return advance, psi_next


def _resolve_row(f_line, fprime_line, fvals, change, theta_s, psi_s):
    """Slow path for a batch row whose scan did not show exactly one crossing."""
    roots = []
    for k in np.nonzero(change)[0]:
        lo = np.array([_OFFSETS[k]])
        hi = np.array([_OFFSETS[k + 1]])
        roots.append(
            float(_refine(f_line, fprime_line, lo, hi, fvals[k : k + 1])[0])
        )
    roots.extend(float(_OFFSETS[k]) for k in np.nonzero(fvals == 0.0)[0])
    roots.sort()
    merged = []
    for r in roots:
        if not merged or r - merged[-1] > ROOT_MERGE:
            merged.append(r)
    if not merged:
        raise RootFindError(
            "billiard_step: no boundary crossing found for theta = "
            f"{theta_s:.6g}, psi = {psi_s:.6g} "
            f"(F endpoints {float(fvals[0]):.3g}, {float(fvals[-1]):.3g})"
        )
    if len(merged) > 1:
        raise ConvexityError(
            "billiard_step: chord met the boundary more than twice at "
            f"theta = {theta_s:.6g}, psi = {psi_s:.6g}; curve is not convex"
        )
    return merged[0]


def billiard_step(oval: Oval, state: BilliardState) -> BilliardState:
    """One bounce of the generic billiard map."""
    advance, psi_next = _step_arrays(
        oval.curve, np.array([state.theta]), np.array([state.psi])
    )
    return BilliardState(
        theta=(state.theta + float(advance[0])) % TWO_PI, psi=float(psi_next[0])
    )


# ---------------------------------------------------------------------------
# closed forms for the circle (independent of the generic stepper)
# ---------------------------------------------------------------------------


def circular_alpha(psi, rho0: float, surface: Surface):
    """Parameter advance per bounce in the circular billiard of radius rho0.

    Closed form in (0, 2pi), strictly increasing in psi, with
    alpha(pi - psi) = 2pi - alpha(psi) and alpha(pi/2) = pi.  The arccos
    arguments are written with cos^2(psi) cleared from the denominators so
    psi = pi/2 is regular.
    """
    psi = np.asarray(psi, dtype=float)
    if np.any((psi <= 0.0) | (psi >= math.pi)):
        raise DomainError("circular_alpha: psi must lie in (0, pi)")
    rho0 = float(rho0)
    if rho0 <= 0.0:
        raise DomainError("circular_alpha: rho0 must be positive")
    if surface is Surface.EUCLIDEAN:
        return 2.0 * psi
    c2 = np.cos(psi) ** 2
    s2 = 1.0 - c2
    if surface is Surface.SPHERE:
        if rho0 >= math.pi / 2:
            raise DomainError("circular_alpha: sphere circle needs rho0 < pi/2")
        num = np.cos(rho0) ** 2 * c2 - s2
        den = 1.0 - np.sin(rho0) ** 2 * c2
    else:
        num = np.cosh(rho0) ** 2 * c2 - s2
        den = 1.0 + np.sinh(rho0) ** 2 * c2
    base = np.arccos(np.clip(num / den, -1.0, 1.0))
    return np.where(psi <= math.pi / 2, base, TWO_PI - base)


def circular_step(state: BilliardState, rho0: float, surface: Surface) -> BilliardState:
    """Closed-form bounce of the circular billiard: rotate by alpha, keep psi."""
    alpha = float(circular_alpha(state.psi, rho0, surface))
    return BilliardState(theta=(state.theta + alpha) % TWO_PI, psi=state.psi)


# ---------------------------------------------------------------------------
# generating function and momentum
# ---------------------------------------------------------------------------


def generating_function(oval: Oval, theta0: float, theta1: float) -> float:
    """Twist generating function g = -(geodesic distance between impacts)."""
    gap = (float(theta1) - float(theta0)) % TWO_PI
    if min(gap, TWO_PI - gap) < 1e-9:
        raise CoincidenceError(
            "generating_function: theta0 and theta1 coincide mod 2pi"
        )
    a = curve_eval(oval.curve, float(theta0))
    b = curve_eval(oval.curve, float(theta1))
    return -float(geodesic_distance(a, b, oval.surface))


def momentum_of(oval: Oval, state: BilliardState) -> MomentumState:
    """Conjugate momentum of the impact parameter.

    y = -||Gamma'(theta)|| cos(psi); the sign makes y = -d g /d theta0 hold
    exactly and the twist d(theta1)/d(y0) positive.  |y| < ||Gamma'(theta)||
    for psi in (0, pi).
    """
    speed = float(curve_speed(oval.curve, state.theta))
    return MomentumState(
        theta=state.theta,
        y=_MOMENTUM_ORIENTATION * speed * math.cos(state.psi),
    )


def momentum_values(oval: Oval, theta, psi):
    """Vectorized momentum y over arrays of states."""
    speed = curve_speed(oval.curve, np.asarray(theta, dtype=float))
    return _MOMENTUM_ORIENTATION * speed * np.cos(np.asarray(psi, dtype=float))


def psi_from_momentum(oval: Oval, theta: float, y: float) -> float:
    """Invert momentum_of at fixed theta."""
    speed = float(curve_speed(oval.curve, float(theta)))
    c = float(y) / (_MOMENTUM_ORIENTATION * speed)
    if not -1.0 < c < 1.0:
        raise DomainError(
            f"psi_from_momentum: |y| = {abs(y):.6g} not below the speed "
            f"{speed:.6g}"
        )
    return float(math.acos(c))


# ---------------------------------------------------------------------------
# orbits
# ---------------------------------------------------------------------------


def iterate_many(oval: Oval, theta0, psi0, steps: int):
    """Run `steps` generic bounces for a batch of states in lockstep.

    Returns (theta, psi, lifted_theta), each of shape (steps + 1, batch).
    """
    theta0 = np.mod(np.asarray(theta0, dtype=float), TWO_PI)
    psi0 = np.asarray(psi0, dtype=float)
    if theta0.shape != psi0.shape or theta0.ndim != 1:
        raise ValueError("iterate_many: theta0 and psi0 must be equal-length 1-D")
    batch = theta0.shape[0]
    thetas = np.empty((steps + 1, batch))
    psis = np.empty((steps + 1, batch))
    lifts = np.empty((steps + 1, batch))
    thetas[0], psis[0], lifts[0] = theta0, psi0, theta0
    cur_t, cur_p, cur_l = theta0.copy(), psi0.copy(), theta0.copy()
    for k in range(1, steps + 1):
        advance, cur_p = _step_arrays(oval.curve, cur_t, cur_p)
        cur_l = cur_l + advance
        cur_t = np.mod(cur_t + advance, TWO_PI)
        thetas[k], psis[k], lifts[k] = cur_t, cur_p, cur_l
    return thetas, psis, lifts


def iterate(oval: Oval, state: BilliardState, steps: int,
            use_circular: bool = False) -> LiftedOrbit:
    """Orbit of `steps` bounces with a continuous lift of theta.

    With use_circular=True the closed-form circular map is used instead of
    the generic stepper; the oval must then be an unperturbed circle.
    """
    if steps < 1:
        raise ValueError("iterate: steps must be positive")
    if use_circular:
        if not oval.curve.is_circle:
            raise DomainError("iterate: use_circular requires an unperturbed circle")
        alpha = float(circular_alpha(state.psi, oval.curve.rho0, oval.surface))
        lifts = state.theta + alpha * np.arange(steps + 1)
        return LiftedOrbit(
            theta=np.mod(lifts, TWO_PI),
            psi=np.full(steps + 1, state.psi),
            lifted_theta=lifts,
        )
    thetas, psis, lifts = iterate_many(
        oval, np.array([state.theta]), np.array([state.psi]), steps
    )
    return LiftedOrbit(theta=thetas[:, 0], psi=psis[:, 0], lifted_theta=lifts[:, 0])


def rotation_number(orbit: LiftedOrbit) -> float:
    """Mean advance per bounce divided by 2pi."""
    steps = len(orbit) - 1
    if steps < 10:
        raise TooShortError(
            f"rotation_number: need at least 10 bounces, got {steps}"
        )
    return float(
        (orbit.lifted_theta[-1] - orbit.lifted_theta[0]) / (TWO_PI * steps)
    )
