"""
Error and storage reports for computed factorizations.

``verify`` rebuilds the approximation densely and fills an ErrorReport;
``nnz_counts`` is the storage accounting of each factorization, either with
dense factors or with skeleton columns/rows that keep only a fraction of
their entries. Reports are written as CSV with a fixed header.
"""

import csv
import logging
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Iterable, Mapping, Optional, Sequence, TextIO, Tuple, Union

if sys.version_info >= (3, 10):
    from typing import TypeAlias
else:
    from typing_extensions import TypeAlias

import numpy as np

from ..core.constants import CSV_FLOAT_FORMAT, DEFAULT_SEED, DEFAULT_SPECTRAL_ITERS
from ..core.dense import RngState, frobenius_norm, spectral_norm_est
from ..core.errors import DimensionMismatchError
from ..decompositions.interp import ROWS, CurFactors, IdFactors, TwoSidedIdFactors, id_bound
from ..decompositions.qb import QbFactors
from ..decompositions.rsvd import SvdFactors, power_bound, tail_floor

logger = logging.getLogger(__name__)

Factors: TypeAlias = Union[SvdFactors, IdFactors, TwoSidedIdFactors, CurFactors, QbFactors]

NNZ_KINDS = ("svd", "id", "id_rows", "two_sided_id", "cur", "qb")

REPORT_FIELDS = (
    "method", "m", "n", "k",
    "p", "q", "s", "tol", "block", "max_blocks", "vnum", "seed",
    "rel_frobenius_error", "rel_spectral_error",
    "tail_floor", "rel_tail_floor", "power_bound", "id_bound",
    "nnz_total", "nnz_parts", "wall_time_s",
)
PARAM_FIELDS = ("p", "q", "s", "tol", "block", "max_blocks", "vnum", "seed")


# ----------------------------------------------------------------------------
# Storage accounting
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class NnzReport:
    """Stored entries per factor"""
    kind: str
    parts: Tuple[Tuple[str, int], ...]
    density: Optional[float] = None
    m: int = 0
    n: int = 0
    k: int = 0

    @property
    def total(self) -> int:
        return sum(count for _, count in self.parts)

    def as_dict(self) -> Dict[str, int]:
        return dict(self.parts)

    def describe(self) -> str:
        return ";".join(f"{name}={count}" for name, count in self.parts)


def _sparse(count: int, density: Optional[float]) -> int:
    """Entries kept by a skeleton block at the given density (exact rational rounding up)"""
    if density is None:
        return count
    return math.ceil(Fraction(str(density)) * count)


def nnz_counts(kind: str, m: int, n: int, k: int, density: Optional[float] = None) -> NnzReport:
    """
    Storage of a rank-k factorization of an m x n matrix.

    Dense: SVD k(m+n+1), CUR k(m+n+k), column ID km + k(n-k) + k. With a
    ``density`` f the columns and rows copied out of A (C, R, the skeleton
    block) count f times their size; interpolation blocks and SVD factors
    stay dense.
    """
    if kind not in NNZ_KINDS:
        raise ValueError(f"unknown factorization kind {kind!r}; expected one of {NNZ_KINDS}")
    if density is not None and not 0 < density <= 1:
        raise ValueError(f"density must be in (0, 1], got {density}")
    if min(m, n) < 1 or not 0 <= k <= min(m, n):
        raise ValueError(f"rank {k} invalid for a {m}x{n} matrix")

    if kind == "svd":
        parts = [("U", m * k), ("sigma", k), ("V", n * k)]
    elif kind == "id":
        parts = [("C", _sparse(m * k, density)), ("V", k * (n - k)), ("indices", k)]
    elif kind == "id_rows":
        parts = [("R", _sparse(k * n, density)), ("W", k * (m - k)), ("indices", k)]
    elif kind == "two_sided_id":
        parts = [
            ("W", k * (m - k)),
            ("skeleton", _sparse(k * k, density)),
            ("V", k * (n - k)),
            ("indices", 2 * k),
        ]
    elif kind == "cur":
        parts = [("C", _sparse(m * k, density)), ("U", k * k), ("R", _sparse(k * n, density))]
    else:
        parts = [("Q", m * k), ("B", k * n)]
    return NnzReport(kind, tuple(parts), density, m, n, k)


def factor_kind(factors: Factors) -> str:
    if isinstance(factors, SvdFactors):
        return "svd"
    if isinstance(factors, IdFactors):
        return "id_rows" if factors.axis == ROWS else "id"
    if isinstance(factors, TwoSidedIdFactors):
        return "two_sided_id"
    if isinstance(factors, CurFactors):
        return "cur"
    if isinstance(factors, QbFactors):
        return "qb"
    raise TypeError(f"unsupported factor type {type(factors).__name__}")


def nnz_report(factors: Factors, shape: Tuple[int, int], density: Optional[float] = None) -> NnzReport:
    """Storage of computed factors of an m x n matrix"""
    m, n = shape
    return nnz_counts(factor_kind(factors), m, n, factors.rank, density)


# ----------------------------------------------------------------------------
# Error reports
# ----------------------------------------------------------------------------

def reconstruct(factors: Factors, a: np.ndarray) -> np.ndarray:
    """Dense approximation of ``a`` held by ``factors``"""
    if isinstance(factors, (IdFactors, TwoSidedIdFactors)):
        return factors.reconstruct(a)
    return factors.reconstruct()


@dataclass(frozen=True)
class ErrorReport:
    """Accuracy and storage of one factorization run"""
    method: str
    m: int
    n: int
    k: int
    params: Mapping[str, Any]
    rel_frobenius_error: float
    rel_spectral_error: float
    nnz: NnzReport
    tail_floor: Optional[float] = None
    rel_tail_floor: Optional[float] = None
    bounds: Mapping[str, float] = field(default_factory=dict)
    wall_time: Optional[float] = None

    def as_row(self, float_format: str = CSV_FLOAT_FORMAT) -> Dict[str, str]:
        """CSV fields as strings; floats use ``float_format`` (dot decimal)"""
        def fmt(value: Any) -> str:
            if value is None:
                return ""
            if isinstance(value, bool):
                return str(value).lower()
            if isinstance(value, float):
                return format(value, float_format)
            return str(value)

        row = {
            "method": self.method,
            "m": fmt(self.m),
            "n": fmt(self.n),
            "k": fmt(self.k),
            "rel_frobenius_error": fmt(self.rel_frobenius_error),
            "rel_spectral_error": fmt(self.rel_spectral_error),
            "tail_floor": fmt(self.tail_floor),
            "rel_tail_floor": fmt(self.rel_tail_floor),
            "power_bound": fmt(self.bounds.get("power_bound")),
            "id_bound": fmt(self.bounds.get("id_bound")),
            "nnz_total": fmt(self.nnz.total),
            "nnz_parts": self.nnz.describe(),
            "wall_time_s": fmt(self.wall_time),
        }
        for name in PARAM_FIELDS:
            row[name] = fmt(self.params.get(name))
        return row


def verify(
    a: np.ndarray,
    factors: Factors,
    sigma_true: Optional[Sequence[float]] = None,
    method: str = "",
    params: Optional[Mapping[str, Any]] = None,
    wall_time: Optional[float] = None,
    density: Optional[float] = None,
    spectral_iters: int = DEFAULT_SPECTRAL_ITERS,
    seed: int = DEFAULT_SEED,
) -> ErrorReport:
    """
    Measure how well ``factors`` approximate ``a``.

    With the true spectrum the report also carries the best possible rank-k
    error and the randomized-SVD and ID-from-QB bounds for context.

    Raises:
        DimensionMismatchError: the factors describe a matrix of another shape
    """
    params = dict(params or {})
    try:
        approx = reconstruct(factors, a)
    except IndexError:
        raise DimensionMismatchError("verify", a.shape, detail="skeleton indices out of range") from None
    if approx.shape != a.shape:
        raise DimensionMismatchError("verify", a.shape, approx.shape)
    m, n = a.shape
    k = factors.rank

    diff = a - approx
    norm_a = frobenius_norm(a)
    error = frobenius_norm(diff)
    rel_frobenius = error / norm_a if norm_a > 0 else 0.0

    rng = RngState(seed)
    spectral_error = spectral_norm_est(diff, spectral_iters, rng.substream(0))
    if sigma_true is not None and len(sigma_true):
        spectral_a = float(sigma_true[0])
    else:
        spectral_a = spectral_norm_est(a, spectral_iters, rng.substream(1))
    rel_spectral = spectral_error / spectral_a if spectral_a > 0 else 0.0

    floor = rel_floor = None
    bounds: Dict[str, float] = {}
    if sigma_true is not None:
        sigma = np.asarray(sigma_true, dtype=np.float64)
        floor = tail_floor(sigma, k)
        rel_floor = floor / norm_a if norm_a > 0 else 0.0
        if 0 < k < sigma.size:
            bounds["power_bound"] = power_bound(k, n, int(params.get("q") or 0), float(sigma[k]))
    tol = params.get("tol")
    if tol:
        bounds["id_bound"] = id_bound(k, n, float(tol))

    report = ErrorReport(
        method=method or factor_kind(factors),
        m=m,
        n=n,
        k=k,
        params=params,
        rel_frobenius_error=rel_frobenius,
        rel_spectral_error=rel_spectral,
        nnz=nnz_report(factors, a.shape, density),
        tail_floor=floor,
        rel_tail_floor=rel_floor,
        bounds=bounds,
        wall_time=wall_time,
    )
    logger.info(f"{report.method} rank {k}: relative Frobenius error {rel_frobenius:.3e}")
    return report


def write_reports(
    reports: Iterable[ErrorReport],
    stream: TextIO,
    float_format: str = CSV_FLOAT_FORMAT,
    header: bool = True,
) -> int:
    """Write reports as CSV rows; returns the number of rows written"""
    writer = csv.DictWriter(stream, fieldnames=REPORT_FIELDS, lineterminator="\n")
    if header:
        writer.writeheader()
    count = 0
    for report in reports:
        writer.writerow(report.as_row(float_format))
        count += 1
    return count
