"""Exception hierarchy shared across the engine.

Configuration problems derive from :class:`ConfigError`; numerical failures
(singular solves, quadrature or cutoff non-convergence) derive from
:class:`NumericalError`.  The CLI maps the two families to exit codes 1 and 2.
"""

from __future__ import annotations


class JclError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(JclError, ValueError):
    """Invalid physical parameters; ``field`` names the offending entry."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class NonPositiveOmega(ConfigError):
    def __init__(self, value):
        super().__init__("photon.omega", f"resonator frequency must be > 0, got {value!r}")


class NonPositiveSpacing(ConfigError):
    def __init__(self, value):
        super().__init__("dot.spacing", f"dot level spacing must be > 0, got {value!r}")


class ZeroCutoff(ConfigError):
    def __init__(self, value):
        super().__init__("photon.cutoff", f"photon cutoff must be an integer >= 1, got {value!r}")


class OutOfBand(JclError, ValueError):
    """Energy outside the open spectral band of a lead channel."""


class BandEdgeSingularity(JclError, ValueError):
    """Energy coincides exactly with a band edge, where the lead spectral
    density has a van Hove point.  Quadrature splits intervals so edges are
    never sampled; hitting one signals a caller bug."""


class NoOpenChannels(JclError, ValueError):
    """No scattering channel is open at the requested total energy."""


class NumericalError(JclError, RuntimeError):
    """Base class for numerical failures."""


class SingularLinearSystem(NumericalError):
    """The dot-space linear system is numerically singular (condition number
    beyond 1e14)."""


class QuadratureNotConverged(NumericalError):
    """Adaptive quadrature exhausted its panel budget.

    ``achieved_error`` carries the error estimate at abort time.
    """

    def __init__(self, achieved_error: float, message: str = ""):
        self.achieved_error = achieved_error
        super().__init__(message or f"quadrature error estimate {achieved_error:.3e} above tolerance")


class CutoffNotConverged(NumericalError):
    """Currents still move by more than the convergence tolerance when the
    photon cutoff is increased, and the cutoff cap was reached."""


class ScenarioAssertionFailed(NumericalError):
    """A theorem-backed sign or agreement check failed beyond tolerance."""
