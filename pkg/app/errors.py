"""Exception hierarchy for the residue engine.

Every class also derives from the closest builtin so callers catching
``ValueError`` / ``RuntimeError`` keep working.
"""


class NcwresError(Exception):
    """Base class for all engine errors."""


class DimensionMismatchError(NcwresError, ValueError):
    pass


class InvalidParameterError(NcwresError, ValueError):
    pass


class InvalidLiteralError(InvalidParameterError):
    pass


class UnsupportedPoleError(NcwresError, ValueError):
    pass


class IntegrabilityError(NcwresError, ValueError):
    pass


class ModelingBugError(NcwresError, RuntimeError):
    """Raised when a result contradicts the structure the engine relies on."""


class SingularSymbolError(ModelingBugError):
    pass


class HDegreeOverflowError(ModelingBugError, ArithmeticError):
    pass


class ScopeError(NcwresError, ValueError):
    """Requested orders, dimensions or derivatives are outside what the engine models."""


class SphereIntegrationUnsupportedError(NcwresError, RuntimeError):
    pass


class InternalConsistencyError(NcwresError, RuntimeError):
    pass


class OverdeterminedSampleError(NcwresError, ValueError):
    pass


class SingularSampleSystemError(NcwresError, ValueError):
    pass


class GoldenFileError(NcwresError, ValueError):
    pass
