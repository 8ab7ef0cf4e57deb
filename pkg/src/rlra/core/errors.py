"""
Exception hierarchy for the randomized low-rank toolkit.

Every error raised on purpose by the library derives from ``RlraError`` so
callers (and the CLI error handler) can separate numerical failures from
programming mistakes.
"""

from typing import Optional, Sequence, Tuple


class RlraError(Exception):
    """Base class for all library errors"""


class DimensionMismatchError(RlraError, ValueError):
    """Operand shapes do not agree"""

    def __init__(self, operation: str, *shapes: Sequence[int], detail: str = ""):
        self.operation = operation
        self.shapes: Tuple[Tuple[int, ...], ...] = tuple(tuple(s) for s in shapes)
        shape_text = " and ".join("x".join(str(d) for d in s) for s in self.shapes)
        message = f"{operation}: incompatible shapes {shape_text}"
        if detail:
            message += f" ({detail})"
        super().__init__(message)


class RankModeError(RlraError, ValueError):
    """Rank-or-tolerance contract violated (both, neither, or out of range)"""


class ConvergenceError(RlraError):
    """An iterative kernel hit its sweep cap"""

    def __init__(self, kernel: str, sweeps: int, off_norm: float):
        self.kernel = kernel
        self.sweeps = sweeps
        self.off_norm = off_norm
        super().__init__(
            f"{kernel} did not converge after {sweeps} sweeps "
            f"(off-diagonal norm {off_norm:.3e})"
        )


class NumericalRankError(RlraError):
    """Requested rank exceeds what the squared-conditioning route can resolve"""


class DenseOracleLimitError(RlraError):
    """Matrix too large for the dense deterministic oracle"""


class RankDeficiencyError(RlraError):
    """A skeleton block is rank deficient to working precision"""

    def __init__(self, message: str, index: Optional[int] = None):
        self.index = index
        super().__init__(message)


class MatrixFormatError(RlraError):
    """Binary matrix file is malformed"""

    def __init__(self, path: str, message: str, offset: Optional[int] = None):
        self.path = path
        self.offset = offset
        where = f" at byte offset {offset}" if offset is not None else ""
        super().__init__(f"{path}: {message}{where}")


class NotSymmetricError(RlraError, ValueError):
    """Input to the symmetric eigensolver is not symmetric"""
