class TsmError(Exception):
    """Base class for all errors raised by tsmverify."""


class InputError(TsmError, ValueError):
    """Bad argument: dimension mismatch, out-of-range parameter, empty set."""


class ModelFormatError(TsmError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class DataFormatError(TsmError):
    def __init__(self, message: str, row: int | None = None):
        self.row = row
        super().__init__(f"row {row}: {message}" if row is not None else message)


class EvaluationError(TsmError, KeyError):
    """A formula mentions a variable the assignment does not cover."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unassigned variable"


class EncodingError(TsmError, ValueError):
    pass


class ProtocolError(TsmError):
    """A solver produced output that violates the DIMACS/competition contract."""


class SolverLaunchError(TsmError):
    pass


class BudgetExceeded(TsmError):
    """A brute-force oracle was asked to enumerate more than its budget."""
