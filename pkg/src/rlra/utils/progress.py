"""
Progress tracking for long benchmark sweeps
"""
import logging
import sys
import time
from typing import Optional

from tqdm import tqdm


class ProgressTracker:
    """Track and display progress for long-running sweeps (bar goes to stderr)"""

    def __init__(self, total_items: int, desc: str = "Benchmark",
                 mode: str = "simple", unit: str = "runs"):
        self.total_items = total_items
        self.desc = desc
        self.start_time = time.time()
        self.processed = 0
        self.errors = 0
        self.logger = logging.getLogger(__name__)

        self.pbar: Optional[tqdm] = None
        if mode != "none" and total_items:
            self.pbar = tqdm(total=total_items, desc=desc, unit=unit,
                             dynamic_ncols=True, file=sys.stderr)

    def update(self, label: str = "", success: bool = True) -> None:
        """Record one finished item"""
        self.processed += 1
        if not success:
            self.errors += 1
        if self.pbar:
            if label:
                self.pbar.set_postfix_str(label)
            self.pbar.update(1)

    def close(self) -> None:
        if self.pbar:
            self.pbar.close()
            self.pbar = None
        elapsed = time.time() - self.start_time
        self.logger.info(
            f"{self.desc}: {self.processed}/{self.total_items} done, "
            f"{self.errors} failed in {elapsed:.1f}s"
        )

    def __enter__(self) -> "ProgressTracker":
        return self

    def __exit__(self, exc_type, exc, tb) -> None:
        self.close()
