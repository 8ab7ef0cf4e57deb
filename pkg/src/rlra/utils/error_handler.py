"""
User-Friendly Error Handling

Turns library exceptions into short messages with suggestions for the
command-line user.
"""

import logging
import traceback
from enum import Enum
from typing import Any, Dict, List, Optional

from ..core.errors import (
    ConvergenceError,
    DenseOracleLimitError,
    DimensionMismatchError,
    MatrixFormatError,
    NotSymmetricError,
    NumericalRankError,
    RankDeficiencyError,
    RankModeError,
)


class ErrorCategory(Enum):
    """Categories of errors"""
    FILE_ACCESS = "file_access"
    MATRIX_FORMAT = "matrix_format"
    DIMENSION = "dimension"
    PARAMETER = "parameter"
    NUMERICAL = "numerical"
    CONFIGURATION = "configuration"
    SYSTEM = "system"


class UserFriendlyError:
    """User-friendly error representation"""

    def __init__(self,
                 category: ErrorCategory,
                 title: str,
                 message: str,
                 suggestions: Optional[List[str]] = None,
                 technical_details: Optional[str] = None,
                 error_code: Optional[str] = None):
        self.category = category
        self.title = title
        self.message = message
        self.suggestions = suggestions or []
        self.technical_details = technical_details
        self.error_code = error_code


class ErrorHandler:
    """
    Converts exceptions into user-friendly error messages.

    The exception text is always part of the message; suggestions depend on
    the error kind, and the traceback is only shown in verbose mode.
    """

    def __init__(self, verbose: bool = False):
        self.verbose = verbose
        self.logger = logging.getLogger(__name__)
        self.error_templates = self._load_error_templates()

    def _load_error_templates(self) -> Dict[str, Dict[str, Any]]:
        return {
            "file_not_found": {
                "category": ErrorCategory.FILE_ACCESS,
                "title": "File not found",
                "suggestions": [
                    "Check the path given to --in",
                    "Generate a test matrix first with 'rlra gen'",
                ],
            },
            "permission_denied": {
                "category": ErrorCategory.FILE_ACCESS,
                "title": "Permission denied",
                "suggestions": ["Check file permissions or choose another --out-prefix"],
            },
            "matrix_format": {
                "category": ErrorCategory.MATRIX_FORMAT,
                "title": "Invalid matrix file",
                "suggestions": [
                    "Matrix files hold two little-endian int32 dimensions followed by rows*cols float64 values",
                    "Regenerate the file or check that it was fully written",
                ],
            },
            "dimension_mismatch": {
                "category": ErrorCategory.DIMENSION,
                "title": "Incompatible shapes",
                "suggestions": [
                    "The rank plus oversampling must not exceed min(m, n)",
                    "Check that the factors were computed from this matrix",
                ],
            },
            "rank_mode": {
                "category": ErrorCategory.PARAMETER,
                "title": "Rank or tolerance required",
                "suggestions": [
                    "Give exactly one of --k or --tol",
                    "Tolerance mode is available with --method det or --method blockrand",
                ],
            },
            "invalid_option": {
                "category": ErrorCategory.PARAMETER,
                "title": "Invalid parameter",
                "suggestions": ["Use --help to list valid values"],
            },
            "numerical_rank": {
                "category": ErrorCategory.NUMERICAL,
                "title": "Rank beyond numerical rank",
                "suggestions": [
                    "Use --vnum qr",
                    "Lower --k",
                ],
            },
            "rank_deficiency": {
                "category": ErrorCategory.NUMERICAL,
                "title": "Rank-deficient skeleton",
                "suggestions": ["Lower --k or use a tolerance with --tol"],
            },
            "convergence": {
                "category": ErrorCategory.NUMERICAL,
                "title": "Iteration did not converge",
                "suggestions": [
                    "Raise eig_max_sweeps / svd_max_sweeps in the kernels config section",
                    "Check the input for extreme scaling",
                ],
            },
            "dense_limit": {
                "category": ErrorCategory.NUMERICAL,
                "title": "Matrix too large for the dense method",
                "suggestions": [
                    "Use --method rand or --method blockrand",
                    "Raise dense_oracle_limit in the kernels config section",
                ],
            },
            "config_invalid": {
                "category": ErrorCategory.CONFIGURATION,
                "title": "Invalid configuration",
                "suggestions": [
                    "Check the configuration file given to --config",
                    "Start from config/default.json",
                ],
            },
            "memory_error": {
                "category": ErrorCategory.SYSTEM,
                "title": "Out of memory",
                "suggestions": ["Use a smaller matrix or a randomized method"],
            },
            "system_error": {
                "category": ErrorCategory.SYSTEM,
                "title": "Unexpected error",
                "suggestions": ["Rerun with --log-level DEBUG and --verbose-errors for details"],
            },
        }

    def handle_exception(self, exception: Exception, context: Optional[Dict[str, Any]] = None) -> UserFriendlyError:
        """
        Convert exception to user-friendly error.

        Args:
            exception: The original exception
            context: Extra flags such as ``config_validation``

        Returns:
            UserFriendlyError object
        """
        context = context or {}
        error_key = self._classify_exception(exception, context)
        error_info = self.error_templates.get(error_key, self.error_templates["system_error"])

        technical_details = None
        if self.verbose:
            technical_details = f"{type(exception).__name__}: {exception}\n{traceback.format_exc()}"

        return UserFriendlyError(
            category=error_info["category"],
            title=error_info["title"],
            message=str(exception) or type(exception).__name__,
            suggestions=list(error_info["suggestions"]),
            technical_details=technical_details,
            error_code=error_key,
        )

    def _classify_exception(self, exception: Exception, context: Dict[str, Any]) -> str:
        """Classify exception to determine error template"""
        # Library errors first: several of them are also ValueErrors
        if isinstance(exception, MatrixFormatError):
            return "matrix_format"
        if isinstance(exception, RankModeError):
            return "rank_mode"
        if isinstance(exception, DimensionMismatchError):
            return "dimension_mismatch"
        if isinstance(exception, NumericalRankError):
            return "numerical_rank"
        if isinstance(exception, RankDeficiencyError):
            return "rank_deficiency"
        if isinstance(exception, ConvergenceError):
            return "convergence"
        if isinstance(exception, DenseOracleLimitError):
            return "dense_limit"
        if isinstance(exception, NotSymmetricError):
            return "invalid_option"

        if isinstance(exception, FileNotFoundError):
            return "file_not_found"
        if isinstance(exception, PermissionError):
            return "permission_denied"
        if isinstance(exception, MemoryError):
            return "memory_error"
        if isinstance(exception, ValueError):
            if context.get("config_validation"):
                return "config_invalid"
            return "invalid_option"
        return "system_error"

    def format_error_message(self, error: UserFriendlyError, show_suggestions: bool = True) -> str:
        """Format error for display"""
        lines = [f"❌ {error.title}", f"   {error.message}", ""]

        if show_suggestions and error.suggestions:
            lines.append("💡 Suggestions:")
            for suggestion in error.suggestions:
                lines.append(f"   • {suggestion}")
            lines.append("")

        if self.verbose and error.technical_details:
            lines.append("🔧 Technical details:")
            for line in error.technical_details.split('\n'):
                if line.strip():
                    lines.append(f"   {line}")
            lines.append("")

        if error.error_code:
            lines.append(f"🔍 Error code: {error.error_code}")

        return '\n'.join(lines)

    def log_error(self, error: UserFriendlyError, original_exception: Optional[Exception] = None) -> None:
        """Log error with the category's level"""
        if error.category in (ErrorCategory.PARAMETER, ErrorCategory.CONFIGURATION):
            self.logger.warning(f"User Error: {error.title} - {error.message}")
        elif error.category == ErrorCategory.NUMERICAL:
            self.logger.error(f"Numerical Error: {error.title} - {error.message}")
        else:
            self.logger.error(f"Error: {error.title} - {error.message}")

        if original_exception is not None and self.verbose:
            self.logger.debug(f"Technical details: {error.technical_details}")


_error_handler: Optional[ErrorHandler] = None


def get_error_handler(verbose: bool = False) -> ErrorHandler:
    """Get global error handler instance"""
    global _error_handler
    if _error_handler is None or _error_handler.verbose != verbose:
        _error_handler = ErrorHandler(verbose=verbose)
    return _error_handler


def handle_user_error(exception: Exception, context: Optional[Dict[str, Any]] = None,
                      verbose: bool = False) -> str:
    """Classify, log and format an exception for standard error"""
    handler = get_error_handler(verbose)
    error = handler.handle_exception(exception, context)
    handler.log_error(error, exception)
    return handler.format_error_message(error)
