"""Exception hierarchy shared by the library and the command line.

The CLI maps these onto exit codes: ParseError -> 2, BudgetExceededError -> 3,
any failed check -> 1.
"""


class SqueezeError(Exception):
    """Base class for every error raised on purpose by this package."""


class ParseError(SqueezeError):
    """Input file or argument could not be parsed or failed schema validation."""


class BudgetExceededError(SqueezeError):
    """A bounded search (closure, splitting, stabilization) ran out of budget."""

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ModuleStructureError(SqueezeError):
    """Action data, subspace or map does not have the required structure."""


class ConsistencyError(SqueezeError):
    """An internal self-check failed (d^2 != 0, cover contract, normality...)."""


class LemmaViolationError(ConsistencyError):
    """A computed value contradicts a theorem the computation is meant to verify."""


class InsufficientTraceError(SqueezeError):
    """A resolution trace is too short to determine the requested degrees."""

    def __init__(self, required_length: int, actual_length: int):
        super().__init__(
            f"trace of length {actual_length} is too short; "
            f"length {required_length} is required for this window"
        )
        self.required_length = required_length
        self.actual_length = actual_length


class WindowTooSmallError(SqueezeError):
    """A graded module is not known far enough up to answer a query."""

    def __init__(self, degree: int, top: int, detail: str = ""):
        message = f"degree {degree} lies above the module window (top {top})"
        if detail:
            message += f": {detail}"
        super().__init__(message)
        self.degree = degree
        self.top = top
