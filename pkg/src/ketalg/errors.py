"""Exception types shared across the package."""


class KetAlgError(Exception):
    """Base class for all errors raised by this package."""


class NotNumericError(KetAlgError):
    """A scalar expression could not be reduced to a plain number."""


class DivergentIntegralError(KetAlgError):
    """An integration variable cannot be eliminated; the integral is undefined."""


class IncompatibleStatesError(KetAlgError):
    """Base states cannot be combined (addition, inner or tensor product)."""


class VariableCollisionError(KetAlgError):
    """Two operands share free variable names; rename one side first."""


class UnknownScalarError(KetAlgError):
    """A scalar-to-number converter met an expression it has no rule for."""


class InvalidProbabilitiesError(KetAlgError):
    """Measurement probabilities are negative or do not sum to one."""


class UnsupportedProjectorError(KetAlgError):
    """Requested photon-count projector is outside the implemented set."""
