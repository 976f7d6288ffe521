"""Subharmonic analysis of resonant circles of the circular billiard.

For the unperturbed circle every invariant circle psi = const is foliated
by orbits; at a rational rotation number the circle alpha(psi) = 2 pi m/n
is resonant.  Under the radial perturbation rho_eps = rho0 + eps*rho1 the
n-chains over each base angle theta survive as critical points of the
subharmonic potential

    L_eps(theta) = sum_{j=0}^{n-1} g_eps(theta_j, theta_{j+1}),

the sum of the generating function g = -distance along the continued chain
with theta_n = theta + 2 pi m.  Its first-order coefficient has the closed
form

    L_1(theta) = C(rho0, m, n) * sum_{j=0}^{n-1} rho1(theta + 2 pi m j/n),

obtained by expanding cos/cosh of the chord length to first order in eps.
A nonconstant L_1 obstructs survival of the resonant invariant circle: the
verdict is BreaksUp when rho1 carries a nonzero Fourier mode at a nonzero
multiple of n, and CriterionSilent otherwise (first order says nothing).

Two independent routes are kept deliberately separate: the closed form
above, and the numerical continuation of the n-chains through the generic
billiard stepper (continue_invariant_radial / subharmonic_potential), whose
mean-free L_eps / eps must converge to L_1 at first order
(first_order_check).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import brentq

from .billiard import PSI_GUARD, _step_arrays, circular_alpha, momentum_values
from .curves import Oval, RadialCurve, curve_eval, validate_oval
from .errors import (
    ContinuationError,
    DomainError,
    NoSolutionError,
    OrderTestFailure,
    ResonanceMismatchError,
)
from .surfaces import TWO_PI, Surface, embed, geodesic_distance

# Fourier modes of rho1 below this amplitude count as absent for the verdict.
MODE_TOL = 1e-14
# Accepted angular closure error of the continued n-chain.
CONTINUATION_TOL = 1e-11
# Half-width of the psi bracket around the resonant angle.
CONTINUATION_BRACKET = 0.2
# Sampled spectra must be this clean above grid/4 (else the grid doubles).
ALIAS_TOL = 1e-10
# Accepted residual of alpha(psi) - 2 pi m / n after the resonance solve.
RESONANCE_TOL = 1e-12

_MAX_GRID = 16384


class Verdict(Enum):
    """First-order fate of a resonant invariant circle."""

    BREAKS_UP = "BreaksUp"
    CRITERION_SILENT = "CriterionSilent"


@dataclass(frozen=True)
class Resonance:
    """An (m, n) resonant invariant circle of the circular billiard."""

    m: int
    n: int
    psi: float
    l0: float
    rho0: float
    surface: Surface


def find_resonance(m: int, n: int, rho0: float, surface: Surface) -> Resonance:
    """Solve alpha(psi) = 2 pi m / n on the circle of radius rho0.

    Requires 0 < m < n coprime.  l0 is the geodesic chord length between
    consecutive impacts of the resonant polygon.
    """
    m, n = int(m), int(n)
    if not 0 < m < n:
        raise DomainError("find_resonance: need 0 < m < n")
    if math.gcd(m, n) != 1:
        raise DomainError("find_resonance: m and n must be coprime")
    surface = Surface.from_name(surface)
    rho0 = float(rho0)
    target = TWO_PI * m / n
    if surface is Surface.EUCLIDEAN:
        if rho0 <= 0.0:
            raise DomainError("find_resonance: rho0 must be positive")
        psi = math.pi * m / n
    else:
        lo, hi = 1e-9, math.pi - 1e-9
        f_lo = float(circular_alpha(lo, rho0, surface)) - target
        f_hi = float(circular_alpha(hi, rho0, surface)) - target
        if not (f_lo < 0.0 < f_hi):
            raise NoSolutionError(
                f"find_resonance: no bracket for alpha = {target:.6g} "
                f"(endpoint gaps {f_lo:.3g}, {f_hi:.3g})"
            )
        psi = float(
            brentq(
                lambda p: float(circular_alpha(p, rho0, surface)) - target,
                lo,
                hi,
                xtol=1e-15,
                rtol=1e-15,
                maxiter=200,
            )
        )
        residual = abs(float(circular_alpha(psi, rho0, surface)) - target)
        if residual > RESONANCE_TOL:
            raise NoSolutionError(
                f"find_resonance: solver residual {residual:.3g} exceeds "
                f"{RESONANCE_TOL}"
            )
    l0 = float(
        geodesic_distance(
            embed(rho0, 0.0, surface), embed(rho0, target, surface), surface
        )
    )
    return Resonance(m=m, n=n, psi=psi, l0=l0, rho0=rho0, surface=surface)


def melnikov_constant(res: Resonance) -> float:
    """First-order coefficient C(rho0, m, n) of the subharmonic potential.

    The sign follows from d(arccos)/dx = -1/sin evaluated at the chord
    length l0 in the first-order expansion of -distance; all three surfaces
    come out negative, and the spherical and hyperbolic values reduce to
    the Euclidean one as rho0 -> 0.
    """
    s2 = math.sin(math.pi * res.m / res.n) ** 2
    if res.surface is Surface.EUCLIDEAN:
        return -4.0 * res.rho0 * s2 / res.l0
    if res.surface is Surface.SPHERE:
        return -2.0 * math.sin(2.0 * res.rho0) * s2 / math.sin(res.l0)
    return -2.0 * math.sinh(2.0 * res.rho0) * s2 / math.sinh(res.l0)


def resonant_sum(curve: RadialCurve, res: Resonance, theta):
    """sum_{j=0}^{n-1} rho1(theta + 2 pi m j / n), vectorized over theta."""
    theta = np.asarray(theta, dtype=float)
    out = np.zeros(theta.shape)
    for j in range(res.n):
        out += curve.rho1(theta + TWO_PI * res.m * j / res.n)
    return out


@dataclass(frozen=True)
class MelnikovResult:
    """Closed-form first-order potential on a sample grid."""

    resonance: Resonance
    constant: float
    thetas: np.ndarray
    values: np.ndarray
    fourier: dict
    resonant_modes: tuple
    verdict: Verdict


def _pow2_at_least(g: int) -> int:
    p = 1
    while p < g:
        p *= 2
    return p


def melnikov_potential(res: Resonance, curve: RadialCurve,
                       grid: int = 256) -> MelnikovResult:
    """Sample L_1 = C * resonant_sum and extract its exact Fourier content.

    The sample grid is a power of two, doubled until modes above grid/4
    cannot alias (rho1 is a trigonometric polynomial, so its top mode is
    known exactly).  The one-sided coefficient convention matches
    RadialCurve: L_1(theta) = Re sum_j fourier[j] e^{i j theta}.
    """
    if res.surface is not curve.surface:
        raise ResonanceMismatchError(
            "melnikov_potential: resonance and curve live on different surfaces"
        )
    if abs(res.rho0 - curve.rho0) > 1e-12:
        raise ResonanceMismatchError(
            f"melnikov_potential: resonance rho0 = {res.rho0!r} but curve "
            f"rho0 = {curve.rho0!r}"
        )
    if grid < 64:
        raise ValueError("melnikov_potential: grid must be at least 64")
    g = _pow2_at_least(int(grid))
    top = max(curve.modes, default=0)
    while top >= g // 4 and g < _MAX_GRID:
        g *= 2
    if top >= g // 4:
        raise DomainError(
            f"melnikov_potential: mode {top} needs a grid above {_MAX_GRID}"
        )
    constant = melnikov_constant(res)
    thetas = np.linspace(0.0, TWO_PI, g, endpoint=False)
    values = constant * resonant_sum(curve, res, thetas)
    fourier = {
        j: res.n * constant * a
        for j, a in curve.coeffs
        if j % res.n == 0
    }
    modes = tuple(
        j for j, a in curve.coeffs
        if j > 0 and j % res.n == 0 and abs(a) > MODE_TOL
    )
    verdict = Verdict.BREAKS_UP if modes else Verdict.CRITERION_SILENT
    return MelnikovResult(
        resonance=res,
        constant=constant,
        thetas=thetas,
        values=values,
        fourier=fourier,
        resonant_modes=modes,
        verdict=verdict,
    )


def breakup_verdict(result: MelnikovResult) -> Verdict:
    """BreaksUp iff rho1 has a mode at a nonzero multiple of n above 1e-14."""
    return Verdict.BREAKS_UP if result.resonant_modes else Verdict.CRITERION_SILENT


# ---------------------------------------------------------------------------
# numerical route: continuation of the n-chains on the perturbed oval
# ---------------------------------------------------------------------------


def _continue_many(oval: Oval, res: Resonance, thetas):
    """Solve f_eps^n(theta, psi) = theta + 2 pi m for a batch of base angles.

    Bisection in psi on [psi_res - 0.2, psi_res + 0.2] (the lifted advance
    gap is increasing in psi by the twist property).  Returns the solved
    psi, the wrapped impact parameters (n+1, G), the outgoing angles at
    each impact (n+1, G) and the final closure gaps.
    """
    curve = oval.curve
    thetas = np.asarray(thetas, dtype=float)

    def lifted_gap(psi_vec, keep_path=False):
        t = thetas.copy()
        p = psi_vec.copy()
        total = np.zeros_like(t)
        path_t = [t.copy()]
        path_p = [p.copy()]
        for _ in range(res.n):
            advance, p = _step_arrays(curve, t, p)
            total = total + advance
            t = np.mod(t + advance, TWO_PI)
            if keep_path:
                path_t.append(t.copy())
                path_p.append(p.copy())
        gap = total - TWO_PI * res.m
        if keep_path:
            return gap, np.array(path_t), np.array(path_p)
        return gap

    lo = np.full_like(thetas, max(res.psi - CONTINUATION_BRACKET, 2 * PSI_GUARD))
    hi = np.full_like(
        thetas, min(res.psi + CONTINUATION_BRACKET, math.pi - 2 * PSI_GUARD)
    )
    gap_lo = lifted_gap(lo)
    gap_hi = lifted_gap(hi)
    if np.any(gap_lo > 0.0) or np.any(gap_hi < 0.0):
        i = int(np.argmax((gap_lo > 0.0) | (gap_hi < 0.0)))
        raise ContinuationError(
            "continue_invariant_radial: bracket lost at theta = "
            f"{float(thetas[i]):.6g}: gap({float(lo[i]):.4g}) = "
            f"{float(gap_lo[i]):.3g}, gap({float(hi[i]):.4g}) = "
            f"{float(gap_hi[i]):.3g}"
        )
    for _ in range(48):
        mid = 0.5 * (lo + hi)
        gap_mid = lifted_gap(mid)
        below = gap_mid < 0.0
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    psi_sol = 0.5 * (lo + hi)
    gap, path_t, path_p = lifted_gap(psi_sol, keep_path=True)
    worst = float(np.max(np.abs(gap)))
    if worst > CONTINUATION_TOL:
        raise ContinuationError(
            f"continue_invariant_radial: closure gap {worst:.3g} exceeds "
            f"{CONTINUATION_TOL}"
        )
    return psi_sol, path_t, path_p, gap


def continue_invariant_radial(oval: Oval, res: Resonance, theta: float):
    """Momenta (y, y_star) of the continued n-chain over base angle theta.

    y is the momentum launching the chain, y_star the momentum with which
    it returns to the same base angle after n bounces and m turns; their
    difference is the derivative of the subharmonic potential.
    """
    base = np.array([float(theta) % TWO_PI])
    psi_sol, _, path_p, _ = _continue_many(oval, res, base)
    y = momentum_values(oval, base, psi_sol)
    y_star = momentum_values(oval, base, path_p[res.n])
    return float(y[0]), float(y_star[0])


@dataclass(frozen=True)
class SubharmonicPotentialSamples:
    """L_eps, h and h_star sampled over one period of the base angle."""

    epsilon: float
    thetas: np.ndarray
    values: np.ndarray
    h: np.ndarray
    h_star: np.ndarray
    psi: np.ndarray


def subharmonic_potential(oval: Oval, res: Resonance,
                          grid: int = 256) -> SubharmonicPotentialSamples:
    """Sample the subharmonic potential of the continued n-chains.

    For each of `grid` equispaced base angles the chain is continued and
    L_eps(theta) = -(sum of chord lengths) accumulated, together with the
    boundary momenta h (launch) and h_star (return).
    """
    if grid < 64:
        raise ValueError("subharmonic_potential: grid must be at least 64")
    g = _pow2_at_least(int(grid))
    thetas = np.linspace(0.0, TWO_PI, g, endpoint=False)
    psi_sol, path_t, path_p, _ = _continue_many(oval, res, thetas)
    points = [curve_eval(oval.curve, path_t[k]) for k in range(res.n + 1)]
    total = np.zeros_like(thetas)
    for k in range(res.n):
        total += geodesic_distance(points[k], points[k + 1], oval.surface)
    return SubharmonicPotentialSamples(
        epsilon=oval.curve.epsilon,
        thetas=thetas,
        values=-total,
        h=momentum_values(oval, thetas, psi_sol),
        h_star=momentum_values(oval, thetas, path_p[res.n]),
        psi=psi_sol,
    )


# ---------------------------------------------------------------------------
# spectra and the first-order cross-check
# ---------------------------------------------------------------------------


def spectral_derivative(values):
    """d/dtheta of periodic samples on a uniform grid via the DFT."""
    values = np.asarray(values, dtype=float)
    g = values.shape[-1]
    spec = np.fft.rfft(values)
    k = np.arange(spec.shape[-1])
    spec = spec * (1j * k)
    if g % 2 == 0:
        spec[..., -1] = 0.0  # Nyquist derivative is not representable
    return np.fft.irfft(spec, n=g)


def sampled_fourier(values, tol: float = ALIAS_TOL, strict: bool = True):
    """Two-sided DFT coefficients of periodic samples, with an alias guard.

    Returns (coefficients, tail) where coefficients maps modes |j| <= G/4
    to c_j with values ~ sum c_j e^{i j theta}, and tail is the largest
    magnitude above G/4.  With strict=True a tail above tol raises.
    """
    values = np.asarray(values, dtype=float)
    g = len(values)
    spec = np.fft.fft(values) / g
    js = np.fft.fftfreq(g, d=1.0 / g).astype(int)
    keep = np.abs(js) <= g // 4
    tail = float(np.max(np.abs(spec[~keep]))) if np.any(~keep) else 0.0
    if strict and tail >= tol:
        raise ValueError(
            f"sampled_fourier: aliasing tail {tail:.3g} above {tol}; "
            "double the grid"
        )
    coeffs = {int(j): complex(c) for j, c in zip(js[keep], spec[keep])}
    return coeffs, tail


@dataclass(frozen=True)
class FirstOrderReport:
    """Convergence of the numerical (L_eps - mean)/eps to the closed form."""

    resonance: Resonance
    eps_list: tuple
    sup_errors: tuple
    order: float
    constant: float
    constant_fits: tuple | None
    constant_extrapolated: float | None
    sign_match: bool | None
    silent: bool
    sup_deviation: tuple


def first_order_check(curve: RadialCurve, res: Resonance,
                      eps_list=(1e-2, 5e-3, 2.5e-3),
                      grid: int = 256) -> FirstOrderReport:
    """Compare the continued potential against the closed-form L_1.

    For each eps the mean-free D_eps = (L_eps - <L_eps>)/eps is computed on
    the grid and compared to the mean-free closed form; the sup errors must
    shrink at empirical order >= 0.5 (expected: 1).  When rho1 carries
    resonant content, regressing D_eps on the resonant sum recovers the
    constant C; the eps -> 0 extrapolation of the fits is reported.
    """
    eps_arr = tuple(float(e) for e in eps_list)
    if len(eps_arr) < 2:
        raise ValueError("first_order_check: need at least two eps values")
    if any(e <= 0.0 for e in eps_arr) or any(
        b >= a for a, b in zip(eps_arr, eps_arr[1:])
    ):
        raise ValueError("first_order_check: eps_list must be positive, decreasing")
    g = _pow2_at_least(max(int(grid), 64))
    thetas = np.linspace(0.0, TWO_PI, g, endpoint=False)
    base_sum = resonant_sum(curve, res, thetas)
    base_sum = base_sum - base_sum.mean()
    constant = melnikov_constant(res)
    closed = constant * base_sum
    silent = bool(np.max(np.abs(base_sum)) <= 1e-12)

    sup_errors = []
    sup_dev = []
    fits = []
    for eps in eps_arr:
        oval = validate_oval(curve.with_epsilon(eps))
        samples = subharmonic_potential(oval, res, grid=g)
        dev = (samples.values - samples.values.mean()) / eps
        sup_errors.append(float(np.max(np.abs(dev - closed))))
        sup_dev.append(float(np.max(np.abs(dev))))
        if not silent:
            fits.append(float(np.dot(dev, base_sum) / np.dot(base_sum, base_sum)))

    log_eps = np.log(np.asarray(eps_arr))
    log_err = np.log(np.maximum(np.asarray(sup_errors), 1e-300))
    order = float(np.polyfit(log_eps, log_err, 1)[0])
    if order < 0.5:
        raise OrderTestFailure(
            f"first_order_check: empirical order {order:.3g} below 0.5 "
            f"(sup errors {sup_errors})"
        )
    if silent:
        extrapolated = None
        sign_match = None
        fits_out = None
    else:
        extrapolated = float(np.polyfit(np.asarray(eps_arr), np.asarray(fits), 1)[1])
        sign_match = bool(math.copysign(1.0, extrapolated)
                          == math.copysign(1.0, constant))
        fits_out = tuple(fits)
    return FirstOrderReport(
        resonance=res,
        eps_list=eps_arr,
        sup_errors=tuple(sup_errors),
        order=order,
        constant=constant,
        constant_fits=fits_out,
        constant_extrapolated=extrapolated,
        sign_match=sign_match,
        silent=silent,
        sup_deviation=tuple(sup_dev),
    )
