"""
Thread-pool helpers for the dense kernels.

Matrix products split their output into column blocks, and the independent
loops of the parallel/hierarchical QB schemes run one work unit per block.
Results are always collected in input order, so the outcome never depends on
which worker finished first.
"""

import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Iterable, List, Optional, Sequence, Tuple, TypeVar

from .constants import (
    DEFAULT_THREADS,
    DENSE_ORACLE_LIMIT,
    JACOBI_EIG_MAX_SWEEPS,
    JACOBI_SVD_MAX_SWEEPS,
    PARALLEL_MIN_COLUMNS,
)

T = TypeVar('T')
U = TypeVar('U')

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class KernelSettings:
    """Process-wide kernel knobs"""
    threads: int = DEFAULT_THREADS
    parallel_min_columns: int = PARALLEL_MIN_COLUMNS
    eig_max_sweeps: int = JACOBI_EIG_MAX_SWEEPS
    svd_max_sweeps: int = JACOBI_SVD_MAX_SWEEPS
    dense_oracle_limit: int = DENSE_ORACLE_LIMIT


_settings = KernelSettings()
_settings_lock = threading.Lock()


def kernel_settings() -> KernelSettings:
    """Current kernel settings"""
    return _settings


def configure_kernels(
    threads: Optional[int] = None,
    parallel_min_columns: Optional[int] = None,
    eig_max_sweeps: Optional[int] = None,
    svd_max_sweeps: Optional[int] = None,
    dense_oracle_limit: Optional[int] = None,
) -> KernelSettings:
    """
    Update the process-wide kernel settings; None keeps the current value.

    Args:
        threads: Worker threads for column-block products (1 = serial)
        parallel_min_columns: Output width below which products stay serial
        eig_max_sweeps: Sweep cap of the Jacobi eigensolver
        svd_max_sweeps: Sweep cap of the Jacobi SVD
        dense_oracle_limit: Largest min(m, n) the dense truncated SVD accepts

    Returns:
        The settings now in effect
    """
    global _settings
    changes = {
        "threads": threads,
        "parallel_min_columns": parallel_min_columns,
        "eig_max_sweeps": eig_max_sweeps,
        "svd_max_sweeps": svd_max_sweeps,
        "dense_oracle_limit": dense_oracle_limit,
    }
    changes = {name: value for name, value in changes.items() if value is not None}
    for name, value in changes.items():
        if value < 1:
            raise ValueError(f"{name} must be at least 1, got {value}")
    with _settings_lock:
        _settings = replace(_settings, **changes)
    logger.debug(f"Kernel settings: {_settings}")
    return _settings


def column_blocks(n: int, parts: int) -> List[Tuple[int, int]]:
    """Split range(n) into at most ``parts`` contiguous (start, stop) blocks"""
    parts = max(1, min(parts, n))
    base, extra = divmod(n, parts)
    blocks = []
    start = 0
    for i in range(parts):
        stop = start + base + (1 if i < extra else 0)
        blocks.append((start, stop))
        start = stop
    return blocks


def map_ordered(
    func: Callable[[T], U],
    items: Iterable[T],
    max_workers: Optional[int] = None,
) -> List[U]:
    """
    Apply ``func`` to independent work units, results in input order.

    Runs inline when only one worker is configured.
    """
    work: Sequence[T] = list(items)
    workers = max_workers or _settings.threads
    if workers <= 1 or len(work) <= 1:
        return [func(item) for item in work]

    with ThreadPoolExecutor(max_workers=min(workers, len(work))) as executor:
        return list(executor.map(func, work))
