"""Exception types raised across the package.

Everything derives from BilliardError so callers (and the CLI) can fence off
expected numerical/validation failures from genuine bugs.
"""


class BilliardError(Exception):
    """Base class for all structured errors raised by this package."""


class DomainError(BilliardError):
    """Input lies outside the mathematical domain of an operation."""


class DegenerateError(BilliardError):
    """A construction degenerated (zero tangent, parallel vectors, ...)."""


class BaseMismatchError(BilliardError):
    """Two tangent vectors were combined but live at different base points."""


class NotConvexError(BilliardError):
    """A curve failed the geodesic-convexity certification."""

    def __init__(self, message, theta=None, curvature=None):
        super().__init__(message)
        self.theta = theta
        self.curvature = curvature


class TangencyError(BilliardError):
    """Launch angle too close to tangency for a reliable impact solve."""


class RootFindError(BilliardError):
    """Bracketed impact search found no admissible root."""


class ConvexityError(BilliardError):
    """A chord met the boundary more than twice; the oval is not convex."""


class CoincidenceError(BilliardError):
    """Two boundary parameters coincide where a chord is required."""


class TooShortError(BilliardError):
    """An orbit is too short for the requested statistic."""


class NoSolutionError(BilliardError):
    """A bracketed scalar solve has no root in the admissible interval."""


class ResonanceMismatchError(BilliardError):
    """Resonance data and curve data describe different unperturbed circles."""


class ContinuationError(BilliardError):
    """The resonant-circle continuation lost its bracket."""


class OrderTestFailure(BilliardError):
    """Empirical convergence order fell below the trust threshold."""


class ConfigError(BilliardError):
    """A run configuration is malformed or inconsistent."""
