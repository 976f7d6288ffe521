"""Radial curves: profiles, derivatives, curvature oracles, oval validation."""

from __future__ import annotations

import cmath
import math

import numpy as np
import pytest

from conftest import SURFACE_CASES, random_oval
from geobilliards import (
    DomainError,
    NotConvexError,
    RadialCurve,
    Surface,
    circle_oval,
    curve_eval,
    curve_speed,
    geodesic_curvature,
    validate_oval,
)

SURFACES = tuple(s for s, _ in SURFACE_CASES)

# Radius grids on which the closed-form circle curvatures are checked.
RHO_GRIDS = {
    Surface.EUCLIDEAN: np.linspace(0.3, 3.0, 12),
    Surface.SPHERE: np.linspace(0.2, 1.4, 12),
    Surface.HYPERBOLIC: np.linspace(0.3, 2.5, 12),
}

CIRCLE_CURVATURE = {
    Surface.EUCLIDEAN: lambda r: 1.0 / r,
    Surface.SPHERE: lambda r: math.cos(r) / math.sin(r),
    Surface.HYPERBOLIC: lambda r: math.cosh(r) / math.sinh(r),
}

# Embedding profile (f, f') with metric ds^2 = d rho^2 + f(rho)^2 d theta^2.
PROFILE = {
    Surface.EUCLIDEAN: lambda r: (r, np.ones_like(r)),
    Surface.SPHERE: lambda r: (np.sin(r), np.cos(r)),
    Surface.HYPERBOLIC: lambda r: (np.sinh(r), np.cosh(r)),
}


def _profile_sum(coeffs, theta, order):
    """Re sum (i j)^order a_j e^{i j theta}, written independently from rho1."""
    total = 0.0
    for j, a in coeffs:
        total += ((1j * j) ** order * a * cmath.exp(1j * j * theta)).real
    return total


# ---------------------------------------------------------------------------
# profile and derivatives
# ---------------------------------------------------------------------------


def test_rho1_matches_independent_sum():
    rng = np.random.default_rng(21)
    coeffs = [(1, 0.3 - 0.2j), (3, complex(rng.normal(), rng.normal()))]
    curve = RadialCurve(surface=Surface.EUCLIDEAN, rho0=1.0, coeffs=coeffs,
                        epsilon=0.01)
    for theta in rng.uniform(0.0, 2.0 * math.pi, 50):
        for order in (0, 1, 2):
            want = _profile_sum(curve.coeffs, float(theta), order)
            got = float(curve.rho1(theta, order))
            assert abs(got - want) < 1e-12


@pytest.mark.parametrize("surface", SURFACES)
def test_curve_eval_derivatives_match_finite_differences(surface):
    rng = np.random.default_rng(22)
    rho0 = dict(SURFACE_CASES)[surface]
    curve = RadialCurve(surface=surface, rho0=rho0,
                        coeffs=[(2, 0.5 + 0.3j), (3, -0.4j)], epsilon=0.02)
    h = 1e-5
    for theta in rng.uniform(0.0, 2.0 * math.pi, 30):
        point, d1, d2 = curve_eval(curve, theta, order=2)
        p_plus = curve_eval(curve, theta + h)
        p_minus = curve_eval(curve, theta - h)
        fd1 = (p_plus - p_minus) / (2.0 * h)
        fd2 = (p_plus - 2.0 * point + p_minus) / (h * h)
        assert np.max(np.abs(d1 - fd1)) < 1e-8
        assert np.max(np.abs(d2 - fd2)) < 1e-5


@pytest.mark.parametrize("surface", SURFACES)
def test_circle_speed_is_metric_radius(surface):
    for rho0 in RHO_GRIDS[surface]:
        curve = RadialCurve(surface=surface, rho0=float(rho0))
        f, _ = PROFILE[surface](np.asarray(rho0))
        speed = curve_speed(curve, np.linspace(0.0, 6.0, 7))
        assert np.max(np.abs(speed - float(f))) < 1e-13


# ---------------------------------------------------------------------------
# curvature
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("surface", SURFACES)
def test_circle_curvature_closed_forms(surface):
    thetas = np.linspace(0.0, 2.0 * math.pi, 17)
    for rho0 in RHO_GRIDS[surface]:
        curve = RadialCurve(surface=surface, rho0=float(rho0))
        kappa = geodesic_curvature(curve, thetas)
        want = CIRCLE_CURVATURE[surface](float(rho0))
        assert np.max(np.abs(kappa - want)) < 1e-8


@pytest.mark.parametrize("surface", SURFACES)
def test_perturbed_curvature_matches_intrinsic_polar_formula(surface):
    """Cross-check the ambient-acceleration route against the intrinsic one.

    For a graph theta -> (r(theta), theta) in the metric
    d rho^2 + f(rho)^2 d theta^2 the geodesic curvature is
    (f^2 f' + 2 f' r'^2 - f r'') / (r'^2 + f^2)^{3/2}, positive toward the
    pole; the derivatives of r are evaluated from the coefficients directly.
    """
    rho0 = dict(SURFACE_CASES)[surface]
    coeffs = [(1, 0.2 + 0.1j), (2, -0.3 + 0.25j), (4, 0.15 - 0.1j)]
    eps = 0.03
    curve = RadialCurve(surface=surface, rho0=rho0, coeffs=coeffs, epsilon=eps)
    rng = np.random.default_rng(23)
    for theta in rng.uniform(0.0, 2.0 * math.pi, 60):
        r = rho0 + eps * _profile_sum(curve.coeffs, float(theta), 0)
        r1 = eps * _profile_sum(curve.coeffs, float(theta), 1)
        r2 = eps * _profile_sum(curve.coeffs, float(theta), 2)
        f, f1 = PROFILE[surface](np.asarray(r))
        f, f1 = float(f), float(f1)
        want = (f * f * f1 + 2.0 * f1 * r1 * r1 - f * r2) / (
            (r1 * r1 + f * f) ** 1.5
        )
        got = float(geodesic_curvature(curve, theta))
        assert abs(got - want) < 1e-10


# ---------------------------------------------------------------------------
# coefficients
# ---------------------------------------------------------------------------


def test_negative_modes_fold_by_conjugation():
    a = 0.7 - 0.4j
    folded = RadialCurve(surface=Surface.EUCLIDEAN, rho0=1.0,
                         coeffs=[(-2, a)], epsilon=0.1)
    direct = RadialCurve(surface=Surface.EUCLIDEAN, rho0=1.0,
                         coeffs=[(2, a.conjugate())], epsilon=0.1)
    assert folded.coeffs == direct.coeffs
    thetas = np.linspace(0.0, 2.0 * math.pi, 64)
    assert np.max(np.abs(folded.rho1(thetas) - direct.rho1(thetas))) == 0.0


def test_coefficients_accumulate_and_drop_zeros():
    curve = RadialCurve(
        surface=Surface.EUCLIDEAN, rho0=1.0,
        coeffs=[(2, 1.0 + 1.0j), (-2, 1.0 - 1.0j), (3, 0.5), (3, -0.5),
                (0, 0.2 + 9.0j)],
        epsilon=0.01,
    )
    # (-2, 1-1j) folds to (2, 1+1j); the two mode-3 terms cancel; the
    # constant keeps only its real part
    assert curve.coeffs == ((0, 0.2 + 0.0j), (2, 2.0 + 2.0j))
    assert curve.modes == (2,)


def test_two_sided_coefficients():
    a = 0.6 + 0.8j
    curve = RadialCurve(surface=Surface.EUCLIDEAN, rho0=1.0,
                        coeffs=[(0, 0.3), (2, a)], epsilon=0.01)
    assert curve.two_sided_coefficient(0) == 0.3 + 0.0j
    assert curve.two_sided_coefficient(2) == 0.5 * a
    assert curve.two_sided_coefficient(-2) == (0.5 * a).conjugate()
    assert curve.two_sided_coefficient(5) == 0.0
    # reconstruction: rho1(theta) = sum over two-sided modes
    thetas = np.linspace(0.0, 2.0 * math.pi, 32)
    rebuilt = sum(
        curve.two_sided_coefficient(j) * np.exp(1j * j * thetas)
        for j in (-2, 0, 2)
    )
    assert np.max(np.abs(rebuilt.imag)) < 1e-15
    assert np.max(np.abs(rebuilt.real - curve.rho1(thetas))) < 1e-14


def test_is_circle_and_with_epsilon():
    curve = RadialCurve(surface=Surface.SPHERE, rho0=0.8,
                        coeffs=[(3, 1.0)], epsilon=0.0)
    assert curve.is_circle
    bumped = curve.with_epsilon(0.05)
    assert not bumped.is_circle
    assert bumped.rho0 == curve.rho0 and bumped.coeffs == curve.coeffs
    assert RadialCurve(surface=Surface.SPHERE, rho0=0.8).is_circle


# ---------------------------------------------------------------------------
# guards and validation
# ---------------------------------------------------------------------------


def test_construction_guards():
    with pytest.raises(DomainError):
        RadialCurve(surface=Surface.EUCLIDEAN, rho0=0.0)
    with pytest.raises(DomainError):
        RadialCurve(surface=Surface.EUCLIDEAN, rho0=-1.0)
    # radius dips below zero
    with pytest.raises(DomainError):
        RadialCurve(surface=Surface.EUCLIDEAN, rho0=0.5,
                    coeffs=[(1, 1.0)], epsilon=1.0)
    # sphere curve pokes out of the open hemisphere
    with pytest.raises(DomainError):
        RadialCurve(surface=Surface.SPHERE, rho0=1.5,
                    coeffs=[(1, 1.0)], epsilon=0.1)


def test_validate_oval_flags_nonconvex_curve():
    # r = 1 + 0.4 cos(2 theta) has negative geodesic curvature near
    # theta = pi/2 where the radius is smallest
    curve = RadialCurve(surface=Surface.EUCLIDEAN, rho0=1.0,
                        coeffs=[(2, 0.4)], epsilon=1.0)
    with pytest.raises(NotConvexError) as info:
        validate_oval(curve)
    assert info.value.curvature < 0.0
    gap = abs(info.value.theta % math.pi - math.pi / 2)
    assert gap < 0.2


def test_validate_oval_accepts_and_reports_margin():
    oval = validate_oval(
        RadialCurve(surface=Surface.EUCLIDEAN, rho0=1.0,
                    coeffs=[(2, 0.4)], epsilon=0.05)
    )
    assert oval.curvature_margin > 0.0
    assert oval.grid >= 256
    with pytest.raises(ValueError):
        validate_oval(oval.curve, grid=64)


def test_circle_oval_and_random_ovals():
    for surface, rho0 in SURFACE_CASES:
        assert circle_oval(surface, rho0).curve.is_circle
        rng = np.random.default_rng(24)
        oval = random_oval(surface, rho0, rng)
        assert oval.curvature_margin > 0.0
        assert not oval.curve.is_circle
