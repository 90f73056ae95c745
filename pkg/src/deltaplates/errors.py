"""Exception hierarchy.

Every error raised on purpose by the library derives from
:class:`DeltaPlatesError`; input problems additionally derive from
:class:`ValueError` so that generic callers can catch them the usual way.
"""


class DeltaPlatesError(Exception):
    """Base class for all library errors."""


class InvalidInput(DeltaPlatesError, ValueError):
    """Arguments violate a documented precondition."""


class NonPositiveKappa(InvalidInput):
    pass


class IndexOutOfRange(InvalidInput, IndexError):
    pass


class NotNonAdjacent(InvalidInput):
    pass


class TooSmall(InvalidInput):
    pass


class TooFewPlates(TooSmall):
    pass


class UnsupportedN(InvalidInput):
    pass


class OnPlatePlane(InvalidInput):
    pass


class StraddlesPlateOrSource(InvalidInput):
    pass


class RequiresKappaOnly(InvalidInput):
    """A formula that is only valid for ζ-independent coefficients was
    called on a stack containing dispersive or magnetodielectric plates."""


class DegenerateCavity(DeltaPlatesError, ArithmeticError):
    """A round-trip factor ``1 - R R' exp(-2 kappa l)`` was not positive."""

    def __init__(self, value: float):
        super().__init__(f"non-positive cavity factor {value!r}")
        self.value = value


class QuadratureNotConverged(DeltaPlatesError, ArithmeticError):
    """Raised when the adaptive integrator exhausts its subdivision budget.

    The best available estimate is attached so callers can decide whether
    it is good enough.
    """

    def __init__(self, value: float, error: float, evaluations: int):
        super().__init__(
            f"quadrature did not converge: value={value!r}, "
            f"error estimate={error!r} after {evaluations} evaluations"
        )
        self.value = value
        self.error = error
        self.evaluations = evaluations


class ParseError(InvalidInput):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)
        self.line = line
        self.column = column


class ValidationError(InvalidInput):
    """Semantic violation in a stack configuration.

    ``code`` identifies the violated rule; each rule has its own code and
    message.
    """

    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code
