"""Exception hierarchy shared by every rieszlab module."""


class RieszLabError(Exception):
    """Base class for all rieszlab failures."""


class PoleError(RieszLabError, ZeroDivisionError):
    """Evaluation requested at a pole (zeta at 1, gamma at a nonpositive integer)."""


class ConvergenceError(RieszLabError):
    """A series or quadrature failed to reach its tolerance."""


class ConsistencyError(RieszLabError):
    """Two internal methods that must agree did not."""


class PrecisionError(RieszLabError):
    """The working precision is too small for the requested evaluation."""


class ResourceError(RieszLabError, MemoryError):
    """A table or series length would exceed its documented cap."""


class BracketError(RieszLabError):
    """No sign change (zero) found in the search bracket."""


class TableFormatError(RieszLabError, ValueError):
    """Malformed zero-table input (ordinate file or enriched CSV)."""


class StripError(RieszLabError, ValueError):
    """Parameter outside the documented convergence strip."""


class SingularFitError(RieszLabError):
    """Least-squares normal equations are singular."""


class PrecisionDowngradeWarning(UserWarning):
    """A stored table carries fewer bits than the caller requested."""
