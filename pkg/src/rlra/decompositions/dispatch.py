"""
Select a factorization routine by decomposition and method name.

Methods:
- det: deterministic pivoted QR / truncated SVD
- rand: one Gaussian sample of width k + p with the power scheme
- blockrand: blocked QB, fixed rank or tolerance
- parallel: QB from independently drawn blocks
- hier: row-block hierarchical QB
"""

import logging
import math
from typing import Optional, Tuple, Union

import numpy as np

from ..core.dense import RngState
from ..core.errors import RankModeError
from .interp import (
    CurFactors,
    IdFactors,
    TwoSidedIdFactors,
    cur,
    cur_blockrand,
    cur_from_column_id,
    cur_rand,
    id_blockrand,
    id_column,
    id_from_qb,
    id_rand,
    id_row,
    id_two_sided,
)
from .qb import QbFactors, qb_blocked, qb_hierarchical, qb_parallel, qb_single
from .rsvd import SvdFactors, blocks_for_rank, rsvd, svd_blockrand, svd_from_qb, svd_truncated
from .sketch import SketchParams

logger = logging.getLogger(__name__)

DECOMPOSITIONS = ("svd", "id", "cur", "qb")
METHODS = ("det", "rand", "blockrand", "parallel", "hier")
ID_VARIANTS = ("columns", "rows", "two_sided")

Factors = Union[SvdFactors, IdFactors, TwoSidedIdFactors, CurFactors, QbFactors]


def _fixed_rank_only(decomp: str, method: str, params: SketchParams) -> None:
    if params.k == 0:
        raise RankModeError(
            f"{decomp} --method {method} is fixed-rank only; use --method blockrand for a tolerance"
        )


def _warn_unused_period(decomp: str, method: str, params: SketchParams) -> None:
    """Only the single-sample rand paths run the s-periodic power loop"""
    if params.s == 1:
        return
    if method == "rand" and decomp in ("svd", "id", "cur") and params.k >= 1:
        return
    logger.warning(
        f"{decomp} --method {method} has no s-periodic power loop; ignoring s={params.s}"
    )


def _parallel_blocks(sample_size: int, b: int, limit: int) -> Tuple[int, int]:
    """Widest block width <= b whose whole-block cover of ``sample_size`` fits in ``limit``"""
    for width in range(min(b, sample_size), 0, -1):
        count = math.ceil(sample_size / width)
        if width * count <= limit:
            return width, count
    return 1, sample_size


def _sampled_qb(a: np.ndarray, method: str, params: SketchParams, rng: RngState,
                row_blocks: int) -> QbFactors:
    """QB of width >= k + p from the parallel or hierarchical scheme"""
    params.check_shape(a.shape)
    if method == "parallel":
        width, count = _parallel_blocks(params.sample_size, params.block, min(a.shape))
        if width != params.block:
            logger.info(f"Parallel QB narrowed to {count} blocks of {width} columns to fit {a.shape}")
        return qb_parallel(a, width, count, q=params.q, rng=rng)
    blocks = blocks_for_rank(params.k, params.p, params.block)
    return qb_hierarchical(a, row_blocks, params.block, blocks, q=params.q, rng=rng)


def factorize(
    a: np.ndarray,
    decomp: str,
    method: str,
    params: SketchParams,
    rng: Optional[RngState] = None,
    id_variant: str = "columns",
    row_blocks: int = 2,
) -> Factors:
    """
    Run ``decomp`` ("svd", "id", "cur" or "qb") with ``method``.

    Args:
        a: Input matrix
        decomp: Decomposition name
        method: One of METHODS
        params: Rank or tolerance plus sketch parameters
        rng: Random stream (defaults to params.seed)
        id_variant: For deterministic ID: columns, rows or two_sided
        row_blocks: Row blocks of the hierarchical QB

    Raises:
        ValueError: unknown decomposition, method or variant
        RankModeError: method does not support the selected mode
    """
    if decomp not in DECOMPOSITIONS:
        raise ValueError(f"unknown decomposition {decomp!r}; expected one of {DECOMPOSITIONS}")
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    if id_variant not in ID_VARIANTS:
        raise ValueError(f"unknown ID variant {id_variant!r}; expected one of {ID_VARIANTS}")
    if id_variant != "columns" and (decomp != "id" or method != "det"):
        raise ValueError(f"ID variant {id_variant!r} needs id --method det")

    rng = rng or params.rng()
    k, tol = params.k, params.tol
    logger.info(f"Running {decomp} ({method}) on {a.shape[0]}x{a.shape[1]} with k={k}, tol={tol}")
    _warn_unused_period(decomp, method, params)

    if method == "det":
        if decomp == "svd":
            return svd_truncated(a, k=k, tol=tol)
        if decomp == "id":
            if id_variant == "rows":
                return id_row(a, k=k, tol=tol)
            if id_variant == "two_sided":
                return id_two_sided(a, k=k, tol=tol)
            return id_column(a, k=k, tol=tol)
        if decomp == "cur":
            return cur(a, k=k, tol=tol)
        raise ValueError("qb has no deterministic method; use rand, blockrand, parallel or hier")

    if method == "rand":
        if decomp == "svd":
            return rsvd(a, params, rng)
        if decomp == "qb":
            if k == 0:
                return qb_single(a, tol, rng=rng)
            params.check_shape(a.shape)
            return qb_blocked(a, params.sample_size, 1, q=params.q, rng=rng)
        _fixed_rank_only(decomp, method, params)
        if decomp == "id":
            return id_rand(a, k, params.p, params.q, params.s, rng)
        return cur_rand(a, k, params.p, params.q, params.s, rng)

    if method == "blockrand":
        blockrand_args = dict(
            k=k, p=params.p, tol=tol, b=params.block, max_blocks=params.max_blocks, q=params.q, rng=rng
        )
        if decomp == "svd":
            return svd_blockrand(a, vnum=params.vnum, **blockrand_args)
        if decomp == "id":
            return id_blockrand(a, **blockrand_args)
        if decomp == "cur":
            return cur_blockrand(a, **blockrand_args)
        blocks = blocks_for_rank(k, params.p, params.block) if k else params.max_blocks
        return qb_blocked(a, params.block, blocks, tol=tol, q=params.q, rng=rng)

    # parallel / hier
    _fixed_rank_only(decomp, method, params)
    qb = _sampled_qb(a, method, params, rng, row_blocks)
    if decomp == "qb":
        return qb
    if decomp == "svd":
        return svd_from_qb(qb, min(k, qb.rank), params.vnum)
    column_id = id_from_qb(qb, a, min(k, qb.rank))
    if decomp == "id":
        return column_id
    return cur_from_column_id(a, column_id)
