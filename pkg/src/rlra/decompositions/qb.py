"""
Adaptive-rank QB factorizations, A ~ Q B with orthonormal Q and B = Q^T A.

- ``qb_single``: one Gaussian vector per step, stops on a Frobenius tolerance
- ``qb_blocked``: b columns per step with the residual updated in place
- ``qb_parallel``: all blocks sampled independently, then orthogonalized
- ``qb_hierarchical``: QB of row blocks merged pairwise up a binary tree

Tolerances are absolute Frobenius norms of the residual A - QB.
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np

from ..core.constants import REORTH_KEEP_NORM
from ..core.dense import (
    RngState,
    freeze,
    frobenius_norm,
    gaussian_matrix,
    householder_qr,
    matmul,
    orth,
    orthonormal_complement,
)
from ..core.errors import DimensionMismatchError
from ..core.parallel import map_ordered
from ..utils.decorators import track_performance
from .sketch import validate_power_params

logger = logging.getLogger(__name__)

# iteration, accumulated Q, copy of the residual working matrix
ProgressCallback = Callable[[int, np.ndarray, np.ndarray], None]


@dataclass(frozen=True)
class QbFactors:
    """
    Q (m x l, orthonormal) and B (l x n).

    Attributes:
        residual_norm: Final ||A - QB||_F
        residual_history: Residual norm after each block
        tolerance_reached: False when a tolerance run hit its block cap first
    """
    q: np.ndarray
    b: np.ndarray
    residual_norm: float
    residual_history: Tuple[float, ...] = field(default_factory=tuple)
    tolerance_reached: bool = True

    @property
    def rank(self) -> int:
        return int(self.q.shape[1])

    def reconstruct(self) -> np.ndarray:
        return matmul(self.q, self.b)


def empty_qb(a: np.ndarray, residual_norm: float) -> QbFactors:
    m, n = a.shape
    return QbFactors(
        q=freeze(np.zeros((m, 0))),
        b=freeze(np.zeros((0, n))),
        residual_norm=residual_norm,
        residual_history=(residual_norm,),
    )


def _project_out(q: np.ndarray, y: np.ndarray) -> np.ndarray:
    """y - Q Q^T y"""
    if q.shape[1] == 0:
        return y
    return y - matmul(q, matmul(q, y, trans_a=True))


def _extend_basis(q_acc: np.ndarray, y: np.ndarray) -> np.ndarray:
    """
    Orthonormal columns for range(y) outside range(Q_acc), two projection passes.

    Columns that are (numerically) inside range(Q_acc) are replaced by
    orthonormal-complement columns, so [Q_acc, Q_i] stays orthonormal even
    when the residual is exactly zero.
    """
    qi = orth(_project_out(q_acc, y))
    if q_acc.shape[1] == 0:
        return qi
    projected = _project_out(q_acc, qi)
    kept = np.sqrt(np.sum(projected * projected, axis=0)) >= REORTH_KEEP_NORM
    if kept.all():
        return orth(projected)
    good = orth(projected[:, kept]) if kept.any() else np.zeros((q_acc.shape[0], 0))
    missing = int(np.count_nonzero(~kept))
    logger.debug(f"Replacing {missing} dependent basis columns from the orthogonal complement")
    fill = orthonormal_complement(np.hstack([q_acc, good]), missing)
    return np.hstack([good, fill])


def _report_tolerance(name: str, tol: float, rank: int, residual: float) -> None:
    logger.warning(f"{name}: tolerance {tol:.3e} not reached at rank {rank} (residual {residual:.3e})")


@track_performance(threshold_ms=60000)
def qb_single(
    a: np.ndarray,
    tol: float,
    max_rank: Optional[int] = None,
    rng: Optional[RngState] = None,
) -> QbFactors:
    """
    Build Q one column at a time from Gaussian samples of the residual.

    Stops as soon as ||A - QB||_F < tol or after ``max_rank`` columns.
    """
    m, n = a.shape
    limit = min(m, n)
    max_rank = limit if max_rank is None else max_rank
    if not tol > 0:
        raise ValueError(f"qb_single needs a positive tolerance, got {tol}")
    if not 1 <= max_rank <= limit:
        raise DimensionMismatchError(
            "qb_single", a.shape, detail=f"max_rank {max_rank} outside 1..{limit}"
        )
    rng = rng or RngState()

    work = np.array(a, dtype=np.float64, order="F", copy=True)
    norm = frobenius_norm(work)
    if norm <= tol:
        return empty_qb(a, norm)

    q = np.zeros((m, 0), order="F")
    b = np.zeros((0, n), order="F")
    history: List[float] = []
    reached = False
    for _ in range(max_rank):
        y = matmul(work, gaussian_matrix(n, 1, rng))
        qj = _extend_basis(q, y)
        bj = matmul(qj, work, trans_a=True)
        work -= matmul(qj, bj)
        q = np.hstack([q, qj])
        b = np.vstack([b, bj])
        norm = frobenius_norm(work)
        history.append(norm)
        if norm < tol:
            reached = True
            break

    if not reached:
        _report_tolerance("qb_single", tol, q.shape[1], norm)
    logger.debug(f"qb_single: rank {q.shape[1]}, residual {norm:.3e}")
    return QbFactors(freeze(q), freeze(b), norm, tuple(history), reached)


@track_performance(threshold_ms=60000)
def qb_blocked(
    a: np.ndarray,
    b: int,
    max_blocks: int,
    tol: float = 0.0,
    q: int = 0,
    reorth_period: int = 1,
    rng: Optional[RngState] = None,
    overwrite_a: bool = False,
    progress_callback: Optional[ProgressCallback] = None,
) -> QbFactors:
    """
    Blocked randomized QB with optional tolerance stop.

    Each iteration samples a b-column block of the current residual (block i
    draws from ``rng.substream(i)``), applies q power steps, re-orthogonalizes
    against the accumulated Q every ``reorth_period`` iterations, and
    subtracts Q_i B_i from the residual. With ``tol == 0`` all blocks run;
    the last block is narrowed so that the rank never exceeds min(m, n).

    Args:
        a: Input matrix; overwritten with the residual when ``overwrite_a``
        b: Block size
        max_blocks: Maximum number of blocks
        tol: Stop once ||A - QB||_F < tol (0 disables)
        q: Power iterations per block
        reorth_period: Re-orthogonalize every this many iterations
        rng: Random state
        overwrite_a: Use ``a`` itself as the working matrix
        progress_callback: Called after every block with (i, Q, residual)
    """
    m, n = a.shape
    limit = min(m, n)
    if b < 1 or max_blocks < 1:
        raise ValueError(
            f"block size and block count must be at least 1, got b={b}, max_blocks={max_blocks}"
        )
    if tol < 0:
        raise ValueError(f"tolerance must be nonnegative, got {tol}")
    if reorth_period < 1:
        raise ValueError(f"reorth_period must be at least 1, got {reorth_period}")
    validate_power_params(q, 1)
    rng = rng or RngState()

    if overwrite_a:
        if not (a.flags.writeable and a.dtype == np.float64):
            raise ValueError("overwrite_a needs a writeable float64 array")
        work = a
    else:
        work = np.array(a, dtype=np.float64, order="F", copy=True)

    norm = frobenius_norm(work)
    if tol > 0 and norm <= tol:
        return empty_qb(a, norm)

    q_acc = np.zeros((m, 0), order="F")
    b_acc = np.zeros((0, n), order="F")
    history: List[float] = []
    reached = tol == 0

    for i in range(max_blocks):
        width = min(b, limit - q_acc.shape[1])
        if width <= 0:
            break
        y = matmul(work, gaussian_matrix(n, width, rng.substream(i)))
        for _ in range(q):
            y = matmul(work, orth(matmul(work, orth(y), trans_a=True)))
        if i % reorth_period == 0:
            qi = _extend_basis(q_acc, y)
        else:
            factor = householder_qr(y)
            # a collapsed sample still has to avoid range(Q_acc)
            qi = _extend_basis(q_acc, y) if factor.degenerate else factor.q
        bi = matmul(qi, work, trans_a=True)
        work -= matmul(qi, bi)
        q_acc = np.hstack([q_acc, qi])
        b_acc = np.vstack([b_acc, bi])
        norm = frobenius_norm(work)
        history.append(norm)
        if progress_callback is not None:
            progress_callback(i, freeze(q_acc), freeze(work))
        if tol > 0 and norm < tol:
            reached = True
            break

    if not reached:
        _report_tolerance("qb_blocked", tol, q_acc.shape[1], norm)
    logger.debug(f"qb_blocked: {len(history)} blocks, rank {q_acc.shape[1]}, residual {norm:.3e}")
    return QbFactors(freeze(q_acc), freeze(b_acc), norm, tuple(history), reached)


@track_performance(threshold_ms=60000)
def qb_parallel(
    a: np.ndarray,
    b: int,
    max_blocks: int,
    q: int = 0,
    rng: Optional[RngState] = None,
) -> QbFactors:
    """
    Approximate blocked QB with independent block samples.

    The power-iterated block samples are computed concurrently (block i owns
    ``rng.substream(i)``), orthonormalized, then projected against the
    accumulated Q one after another. B = Q^T A is a single product.
    """
    m, n = a.shape
    if b < 1 or max_blocks < 1:
        raise ValueError(
            f"block size and block count must be at least 1, got b={b}, max_blocks={max_blocks}"
        )
    if b * max_blocks > min(m, n):
        raise DimensionMismatchError(
            "qb_parallel", a.shape,
            detail=f"b * max_blocks = {b * max_blocks} exceeds min(m, n) = {min(m, n)}",
        )
    validate_power_params(q, 1)
    rng = rng or RngState()

    def sample(i: int) -> np.ndarray:
        y = matmul(a, gaussian_matrix(n, b, rng.substream(i)))
        for _ in range(q):
            qi = orth(y)
            y = matmul(a, qi, trans_a=True)
            qi = orth(y)
            y = matmul(a, qi)
        return y

    samples = map_ordered(sample, range(max_blocks))
    blocks = map_ordered(orth, samples)

    q_acc = np.zeros((m, 0), order="F")
    for qi in blocks:
        qi = _extend_basis(q_acc, qi)
        q_acc = np.hstack([q_acc, qi])

    q_final = freeze(q_acc)
    b_final = matmul(q_final, a, trans_a=True)
    residual = frobenius_norm(a - matmul(q_final, b_final))
    logger.debug(f"qb_parallel: rank {q_final.shape[1]}, residual {residual:.3e}")
    return QbFactors(q_final, b_final, residual, (residual,))


def _is_power_of_two(value: int) -> bool:
    return value >= 2 and value & (value - 1) == 0


def row_block_bounds(m: int, num_row_blocks: int) -> List[Tuple[int, int]]:
    """Equal row blocks; the last one absorbs the remainder"""
    size = m // num_row_blocks
    bounds = [(i * size, (i + 1) * size) for i in range(num_row_blocks)]
    bounds[-1] = (bounds[-1][0], m)
    return bounds


@track_performance(threshold_ms=60000)
def qb_hierarchical(
    a: np.ndarray,
    num_row_blocks: int,
    b: int,
    max_blocks: int,
    q: int = 0,
    rng: Optional[RngState] = None,
) -> QbFactors:
    """
    Row-block QB composed up a binary tree.

    Each row block gets a fixed-rank blocked QB (rank up to b*max_blocks). Sibling
    results are merged by a QB of their stacked B factors, and the merged Q
    is the block-diagonal stage times the merge Q, formed explicitly.

    Raises:
        ValueError: ``num_row_blocks`` not a power of two >= 2
    """
    m, n = a.shape
    if not _is_power_of_two(num_row_blocks):
        raise ValueError(f"num_row_blocks must be a power of two >= 2, got {num_row_blocks}")
    if m < num_row_blocks:
        raise DimensionMismatchError(
            "qb_hierarchical", a.shape, detail=f"fewer rows than {num_row_blocks} row blocks"
        )
    rng = rng or RngState()

    def leaf(index: int) -> QbFactors:
        start, stop = row_block_bounds(m, num_row_blocks)[index]
        return qb_blocked(a[start:stop, :], b, max_blocks, tol=0.0, q=q, rng=rng.substream(0, index))

    nodes = map_ordered(leaf, range(num_row_blocks))
    level = 1
    while len(nodes) > 1:
        def merge(index: int, nodes: List[QbFactors] = nodes, level: int = level) -> QbFactors:
            upper, lower = nodes[2 * index], nodes[2 * index + 1]
            stacked = np.vstack([upper.b, lower.b])
            merged = qb_blocked(stacked, b, max_blocks, tol=0.0, q=q, rng=rng.substream(level, index))
            split = upper.rank
            q_node = np.vstack([
                matmul(upper.q, merged.q[:split, :]),
                matmul(lower.q, merged.q[split:, :]),
            ])
            return QbFactors(freeze(q_node), merged.b, merged.residual_norm)

        nodes = map_ordered(merge, range(len(nodes) // 2))
        level += 1

    root = nodes[0]
    residual = frobenius_norm(a - matmul(root.q, root.b))
    logger.debug(f"qb_hierarchical: {num_row_blocks} row blocks, rank {root.rank}, residual {residual:.3e}")
    return QbFactors(root.q, root.b, residual, (residual,))
