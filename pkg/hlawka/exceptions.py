"""Errors raised by the verification engine."""


class HlawkaError(ValueError):
    """Base class for invalid inputs to the engine."""


class DimensionMismatchError(HlawkaError):
    """Vectors that should share a dimension do not."""


class NonFiniteError(HlawkaError):
    """A coordinate or parameter is NaN or infinite."""


class NotPsdError(HlawkaError):
    """A Gram matrix (or block) fails the positive-semidefinite check."""


class StrategyError(HlawkaError):
    """Unknown or malformed sampling strategy descriptor."""


class FreeBlockError(HlawkaError):
    """Wrong free-parameter set supplied for a dependence case."""


class PreconditionError(HlawkaError):
    """Inputs outside an operation's admissible region."""
