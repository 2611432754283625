"""Exception types shared across the package."""


class CWillmoreError(Exception):
    """Base class for all package errors."""


class InvalidLatticeError(CWillmoreError, ValueError):
    pass


class DegenerateImmersionError(CWillmoreError, ValueError):
    pass


class UnsupportedImmersionError(CWillmoreError, TypeError):
    pass


class NumericalFailure(CWillmoreError, RuntimeError):
    """An iterative solver failed; ``residual`` holds the last residual norm."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class BracketError(NumericalFailure):
    def __init__(self, message: str, table=None):
        super().__init__(message)
        self.table = table


class InfeasibleError(CWillmoreError, RuntimeError):
    pass
