"""Exception hierarchy shared by all timecloak modules."""


class TimecloakError(Exception):
    """Base class for all package errors."""


class ConfigError(TimecloakError):
    """Configuration file failed to parse or validate."""


class CloakedPointError(TimecloakError):
    """The inverse time change was requested inside the cloaked void."""


class NotHyperbolicError(TimecloakError):
    """The time change destroys strict hyperbolicity for these parameters."""


class CflViolationError(TimecloakError):
    """Time step too large for the explicit scheme's stability bound."""


class SignalOutsideWindowError(TimecloakError):
    """Boundary signal support is not contained in the simulation window."""


class OracleDomainExceededError(TimecloakError):
    """Traveling-wave oracle queried where boundary reflections contaminate it."""


class CoverageExceededError(TimecloakError):
    """Time-shift map needs source-field values outside the computed window."""


class StencilTouchesVoidError(TimecloakError):
    """Residual stencil would read a void (cloaked) cell."""


class StencilTouchesBoundaryError(TimecloakError):
    """Residual stencil would leave the interior of the spacetime grid."""


class VoidNearBoundaryError(TimecloakError):
    """Void cells within the boundary-trace stencil (cloak not interior)."""


class NoVoidCellsError(TimecloakError):
    """Event-invariance demo requires a nonempty cloaked region."""


class InsufficientLevelsError(TimecloakError):
    """Convergence study needs at least three refinement levels."""


class PreconditionViolatedError(TimecloakError):
    """An operation's structural precondition does not hold."""
