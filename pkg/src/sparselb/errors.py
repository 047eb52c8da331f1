"""Exception types shared across the library."""


class SparseLBError(Exception):
    """Base class for library errors."""


class DimensionMismatchError(SparseLBError):
    """Operands live in incompatible spaces."""


class EnumerationGuardError(SparseLBError):
    """A combinatorial enumeration would exceed the desk-scale guard."""


class NotANormError(SparseLBError):
    """The requested construction does not define a norm on R^d."""


class PropernessError(SparseLBError):
    """A conjugate required to be proper is identically infinite."""


class SolverError(SparseLBError):
    """An iterative solver failed to reach its tolerance within its cap."""


class BoundViolationError(SparseLBError):
    """A certified lower bound exceeded the exact optimum beyond tolerance."""


class ConfigError(SparseLBError):
    """Invalid run configuration; message names the offending field."""
