"""Exception types shared across the package."""


class BoundError(ValueError):
    """An explicit desk-scale bound was exceeded (factorization, enumeration,
    index bounds of q-expansions)."""


class UnsupportedDomainError(ValueError):
    """The requested computation needs arithmetic outside the supported scope
    (e.g. the p = 2 stabilization branch, or wild p-power characters that
    require ramified extensions)."""


class IntegralityError(ArithmeticError):
    """An exactness assertion failed: a character sum did not reduce to a
    rational integer, or a polynomial division that must be exact was not.
    Signals a bug, never bad input."""


class CertificationError(ArithmeticError):
    """A held-out precision check fell short of the declared certificate."""
