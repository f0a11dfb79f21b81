"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes: usage errors exit 1, domain errors
exit 2, numeric/consistency failures exit 3.
"""


class EinsteinCurvesError(Exception):
    """Base class for all package errors."""


class UsageError(EinsteinCurvesError):
    """The caller violated an interface contract (wrong basis kind, non-closed
    curve passed to a closed-curve invariant, ...)."""


class DomainError(EinsteinCurvesError):
    """Input is outside the mathematical domain of the operation."""


class NumericError(EinsteinCurvesError):
    """An iteration failed to converge or an integration broke down."""


class ConsistencyError(EinsteinCurvesError):
    """A cross-check that should hold by theory failed beyond tolerance."""


class DegenerateCurveError(DomainError):
    """Osculating data is rank deficient at the requested point."""


class NotGenericError(DomainError):
    """The curve has a conformal vertex where a vertex-free curve is required."""
