"""
Utility decorators for the randomized low-rank toolkit

Provides decorators for timing the factorization routines and for enforcing
the rank-or-tolerance contract shared by every tolerance-capable operation.
"""

import functools
import inspect
import logging
import time
from typing import Any, Callable, Optional, TypeVar, cast

from ..core.errors import RankModeError

# Type variables for generic decorators
F = TypeVar('F', bound=Callable[..., Any])


def track_performance(
    threshold_ms: Optional[float] = None,
    log_slow: bool = True
) -> Callable[[F], F]:
    """
    Decorator to track function execution time.

    Every call is logged at DEBUG; calls slower than ``threshold_ms`` are
    logged at WARNING.

    Args:
        threshold_ms: Log warning if execution time exceeds this threshold (milliseconds)
        log_slow: Whether to log slow executions

    Returns:
        Decorated function with performance tracking
    """
    def decorator(func: F) -> F:
        logger = logging.getLogger(func.__module__)

        @functools.wraps(func)
        def wrapper(*args, **kwargs) -> Any:
            start_time = time.perf_counter()
            result = func(*args, **kwargs)
            execution_time = (time.perf_counter() - start_time) * 1000

            logger.debug(f"{func.__name__} finished in {execution_time:.2f}ms")
            if threshold_ms and execution_time > threshold_ms and log_slow:
                logger.warning(
                    f"{func.__name__} took {execution_time:.2f}ms "
                    f"(threshold: {threshold_ms}ms)"
                )

            return result

        return cast(F, wrapper)

    return decorator


def check_rank_or_tolerance(k: Optional[int], tol: Optional[float]) -> None:
    """
    Validate a (k, tol) pair: exactly one of k >= 1 or tol > 0.

    Raises:
        RankModeError: both or neither mode selected, or negative values
    """
    k = 0 if k is None else k
    tol = 0.0 if tol is None else tol
    if k < 0:
        raise RankModeError(f"rank k must be nonnegative, got {k}")
    if tol < 0:
        raise RankModeError(f"tolerance must be nonnegative, got {tol}")
    if k >= 1 and tol > 0:
        raise RankModeError("give either a rank k or a tolerance, not both")
    if k == 0 and not tol > 0:
        raise RankModeError("a rank k >= 1 or a tolerance > 0 is required")


def rank_or_tolerance(
    rank_arg: str = "k",
    tol_arg: str = "tol"
) -> Callable[[F], F]:
    """
    Decorator enforcing the rank-or-tolerance contract on a function's arguments.

    Args:
        rank_arg: Name of the rank parameter
        tol_arg: Name of the tolerance parameter

    Returns:
        Decorated function that raises RankModeError before running
    """
    def decorator(func: F) -> F:
        signature = inspect.signature(func)

        @functools.wraps(func)
        def wrapper(*args, **kwargs) -> Any:
            bound = signature.bind(*args, **kwargs)
            bound.apply_defaults()
            check_rank_or_tolerance(
                bound.arguments.get(rank_arg),
                bound.arguments.get(tol_arg),
            )
            return func(*args, **kwargs)

        return cast(F, wrapper)

    return decorator
