"""Typed errors shared across horolab modules.

Every failure mode that callers are expected to handle gets its own class so
experiment drivers can map them to exit codes without string matching.
"""


class HorolabError(Exception):
    """Base class for all horolab-specific errors."""


class ReductionStall(HorolabError):
    """Fundamental-domain reduction exceeded its generator-application budget."""


class EnumerationOverflow(HorolabError):
    """Lattice enumeration bound too large; point too deep in the cusp."""


class PrecisionExhausted(HorolabError):
    """Floating-point input cannot support the requested digit/level depth."""


class DivisionNearZero(HorolabError):
    """A denominator fell below the safe threshold for a stable division."""


class ResonanceDetected(HorolabError):
    """An arithmetic progression hit a float-rational collision (phase ~ integer)."""


class QuadratureUnderResolved(HorolabError):
    """Doubling the sample count moved a quadrature value beyond tolerance."""


class NotReduced(HorolabError):
    """Operation requires a fundamental-domain representative but got none."""


class NoApproximantFound(HorolabError):
    """No rational approximant with the requested quality exists in range."""


class FactorizationTooLarge(HorolabError):
    """Integer exceeds the factorization table / trial bound."""


class DivisorExplosion(HorolabError):
    """Squarefree divisor enumeration would exceed its budget."""


class RangeUnsupported(HorolabError):
    """Sieve function argument outside the implemented s-range."""


class ScheduleInfeasible(HorolabError):
    """An experiment schedule step exceeds the configured term budget."""
