"""
Error-versus-rank and storage-versus-rank sweeps.

``run_bench`` factorizes one matrix at every requested rank for each
decomposition and verifies the result; ``nnz_table`` evaluates the storage
formulas alone, for any shape, without computing factors.
"""

import csv
import logging
import time
from dataclasses import replace
from typing import Iterable, List, Optional, Sequence, TextIO

import numpy as np

from ..core.constants import CSV_FLOAT_FORMAT, DEFAULT_SPECTRAL_ITERS
from ..decompositions.dispatch import factorize
from ..decompositions.sketch import SketchParams
from ..utils.progress import ProgressTracker
from .reports import ErrorReport, NnzReport, nnz_counts, verify

logger = logging.getLogger(__name__)

BENCH_DECOMPOSITIONS = ("svd", "id", "cur")
NNZ_FIELDS = ("kind", "m", "n", "k", "density", "nnz_total", "nnz_parts")


def parse_int_list(text: str) -> List[int]:
    """'5,10,20' -> [5, 10, 20]"""
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ValueError(f"expected a comma separated list of integers, got {text!r}") from None
    if not values:
        raise ValueError("empty rank list")
    return values


def run_bench(
    a: np.ndarray,
    ks: Sequence[int],
    params: SketchParams,
    decomps: Sequence[str] = ("svd",),
    method: str = "rand",
    sigma_true: Optional[Sequence[float]] = None,
    density: Optional[float] = None,
    progress_mode: str = "simple",
    spectral_iters: int = DEFAULT_SPECTRAL_ITERS,
) -> List[ErrorReport]:
    """
    Factorize ``a`` at every rank in ``ks`` for each decomposition.

    Every run starts from ``params.seed``, so rows do not depend on the
    order of the sweep. Ranks are run in ascending order.
    """
    for decomp in decomps:
        if decomp not in BENCH_DECOMPOSITIONS:
            raise ValueError(f"unknown bench decomposition {decomp!r}; expected one of {BENCH_DECOMPOSITIONS}")
    if any(k < 1 for k in ks):
        raise ValueError(f"bench ranks must be at least 1, got {list(ks)}")

    reports: List[ErrorReport] = []
    total = len(ks) * len(decomps)
    with ProgressTracker(total, desc="bench", mode=progress_mode) as progress:
        for decomp in decomps:
            for k in sorted(ks):
                run_params = replace(params, k=k, tol=0.0)
                start = time.perf_counter()
                factors = factorize(a, decomp, method, run_params)
                elapsed = time.perf_counter() - start
                report = verify(
                    a,
                    factors,
                    sigma_true=sigma_true,
                    method=f"{decomp}-{method}",
                    params=run_params.as_dict(),
                    wall_time=elapsed,
                    density=density,
                    spectral_iters=spectral_iters,
                    seed=run_params.seed,
                )
                reports.append(report)
                progress.update(f"{decomp} k={k}")
    logger.info(f"Bench finished: {len(reports)} runs")
    return reports


def nnz_table(
    m: int,
    n: int,
    ks: Iterable[int],
    kinds: Sequence[str] = BENCH_DECOMPOSITIONS,
    density: Optional[float] = None,
) -> List[NnzReport]:
    """Storage of every kind at every rank, from the formulas only"""
    return [nnz_counts(kind, m, n, k, density) for k in sorted(ks) for kind in kinds]


def write_nnz_table(
    reports: Iterable[NnzReport],
    stream: TextIO,
    float_format: str = CSV_FLOAT_FORMAT,
) -> int:
    """Write storage reports as CSV rows; returns the number of rows written"""
    writer = csv.DictWriter(stream, fieldnames=NNZ_FIELDS, lineterminator="\n")
    writer.writeheader()
    count = 0
    for report in reports:
        writer.writerow({
            "kind": report.kind,
            "m": report.m,
            "n": report.n,
            "k": report.k,
            "density": "" if report.density is None else format(report.density, float_format),
            "nnz_total": report.total,
            "nnz_parts": report.describe(),
        })
        count += 1
    return count
