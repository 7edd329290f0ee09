"""Exception hierarchy shared by the library and the CLI."""


class PTFSenseError(Exception):
    """Base class for all library errors."""


class DimensionError(PTFSenseError, ValueError):
    """Input vector or factor dimension does not match the polynomial."""


class DegreeCapError(PTFSenseError, ValueError):
    """Polynomial expansion would exceed the configured degree cap."""


class PolynomialFormatError(PTFSenseError, ValueError):
    """Malformed polynomial JSON document."""


class DegenerateRestrictionError(PTFSenseError, ArithmeticError):
    """Polynomial vanishes identically on the requested great circle."""


class NotDistinctError(PTFSenseError, ValueError):
    """Two linear forms are linearly dependent."""


class BudgetError(PTFSenseError, ValueError):
    """Sample budget is infeasible for the requested estimate."""


class InsufficientResolutionError(BudgetError):
    """Too few boundary events were observed to form a stable estimate."""


class DegenerateSampleError(PTFSenseError, ArithmeticError):
    """Too many sampled points hit a degenerate configuration."""
