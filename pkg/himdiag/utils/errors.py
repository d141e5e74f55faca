# himdiag/utils/errors.py
from typing import Optional


class HimDiagError(ValueError):
    """Base class for every diagnostic failure raised by himdiag"""


class InsufficientData(HimDiagError):
    pass


class InvalidArgument(HimDiagError):
    pass


class DimensionError(HimDiagError):
    pass


class DegenerateFit(HimDiagError):
    pass


class DegenerateResponse(HimDiagError):
    pass


class FitFailure(HimDiagError):
    pass


class ConfigError(HimDiagError):
    pass


class DegenerateScale(HimDiagError):
    """Zero scale in a column, optionally after deleting observation k"""

    def __init__(self, column: Optional[int] = None, k: Optional[int] = None, message: Optional[str] = None):
        self.column = column
        self.k = k
        if message is None:
            where = "response" if column is None else f"column {column}"
            message = f"Zero scale in {where}"
            if k is not None:
                message += f" after removing observation {k}"
        super().__init__(message)


class SingularDesign(HimDiagError):
    def __init__(self, k: Optional[int] = None, message: Optional[str] = None):
        self.k = k
        if message is None:
            message = "Design matrix is rank deficient"
            if k is not None:
                message += f" after removing observation {k}"
        super().__init__(message)


class ExactLeverage(HimDiagError):
    def __init__(self, k: int):
        self.k = k
        super().__init__(f"Observation {k} has leverage 1; Cook's distance is undefined")


class ConvergenceFailure(HimDiagError):
    def __init__(self, iterations: int, max_change: float, message: Optional[str] = None):
        self.iterations = iterations
        self.max_change = max_change
        super().__init__(
            message or f"No convergence after {iterations} iterations (last max change {max_change:.3e})"
        )


class ParseError(HimDiagError):
    def __init__(self, line: int, column: Optional[int] = None, message: str = "Malformed input"):
        self.line = line
        self.column = column
        where = f"line {line}" if column is None else f"line {line}, column {column}"
        super().__init__(f"{message} ({where})")
