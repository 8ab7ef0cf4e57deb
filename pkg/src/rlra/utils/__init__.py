"""Utility functions for the randomized low-rank toolkit."""

from .decorators import rank_or_tolerance, track_performance
from .error_handler import ErrorCategory, handle_user_error
from .progress import ProgressTracker

__all__ = [
    "rank_or_tolerance",
    "track_performance",
    "ErrorCategory",
    "handle_user_error",
    "ProgressTracker",
]
