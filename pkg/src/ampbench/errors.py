"""Exception and warning types shared across the package."""


class InvalidInputError(ValueError):
    """Argument outside the domain of an operation."""


class PreconditionError(ValueError):
    """Inputs are individually valid but violate an operation's precondition."""


class InsufficientDataError(ValueError):
    """Not enough heralded shots to form an estimate."""


class IntegrationError(RuntimeError):
    """Quadrature weights underflowed or produced a non-finite result."""


class ConstructionError(RuntimeError):
    """A constructed channel failed its trace-non-increasing check."""


class TruncationWarning(UserWarning):
    """Fock truncation is too small for the requested amplitudes."""
