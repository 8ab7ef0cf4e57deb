"""
Low-rank SVDs: the dense truncated oracle and the randomized variants.

All variants keep singular values in descending order and extract the
leading k components, whatever order the inner kernel produced.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ..core.constants import BBT_EIGENVALUE_FLOOR
from ..core.dense import (
    RngState,
    compact_qr,
    freeze,
    gaussian_matrix,
    matmul,
    orth,
    small_svd,
    sym_eig,
)
from ..core.errors import DenseOracleLimitError, DimensionMismatchError, NumericalRankError
from ..core.parallel import kernel_settings
from ..utils.decorators import rank_or_tolerance, track_performance
from .qb import QbFactors, qb_blocked
from .sketch import SketchParams, SvdMethod, sample_right

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SvdFactors:
    """A ~ U diag(sigma) V^T with orthonormal U (m x k) and V (n x k)"""
    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray
    tolerance_reached: bool = True

    @property
    def rank(self) -> int:
        return int(self.sigma.size)

    def reconstruct(self) -> np.ndarray:
        return matmul(self.u * self.sigma, self.v, trans_b=True)


def _factors(u: np.ndarray, sigma: np.ndarray, v: np.ndarray, k: int,
             tolerance_reached: bool = True) -> SvdFactors:
    values = np.array(sigma[:k], dtype=np.float64)
    values.setflags(write=False)
    return SvdFactors(freeze(u[:, :k]), values, freeze(v[:, :k]), tolerance_reached)


def _check_sample_size(a: np.ndarray, k: int, p: int, operation: str) -> int:
    if k < 1:
        raise ValueError(f"{operation}: rank k must be at least 1, got {k}")
    if p < 0:
        raise ValueError(f"{operation}: oversampling p must be nonnegative, got {p}")
    l = k + p
    if l > min(a.shape):
        raise DimensionMismatchError(
            operation, a.shape, detail=f"k + p = {l} exceeds min(m, n) = {min(a.shape)}"
        )
    return l


# ----------------------------------------------------------------------------
# Finishing steps shared by the sampled and QB routes
# ----------------------------------------------------------------------------

def _finish_with_eig(q: np.ndarray, b: np.ndarray, k: int) -> SvdFactors:
    """SVD of QB through the eigendecomposition of B B^T"""
    u_hat, d = sym_eig(matmul(b, b, trans_b=True))
    kept = d[:k]
    d_max = float(d[0]) if d.size else 0.0
    if np.any(kept <= 0.0) or np.any(kept < BBT_EIGENVALUE_FLOOR * d_max):
        raise NumericalRankError(
            f"rank {k} exceeds the numerical rank resolvable through B B^T; use v2 (vnum=qr)"
        )
    sigma = np.sqrt(kept)
    u = matmul(q, u_hat[:, :k])
    v = matmul(b, u_hat[:, :k], trans_a=True) / sigma
    return _factors(u, sigma, v, k)


def _finish_with_qr(q: np.ndarray, bt: np.ndarray, k: int) -> SvdFactors:
    """SVD of Q Bt^T through the QR factorization of Bt (n x l)"""
    q_hat, r_hat = compact_qr(bt)
    u_hat, sigma, v_hat = small_svd(r_hat)
    return _factors(matmul(q, v_hat), sigma, matmul(q_hat, u_hat), k)


# ----------------------------------------------------------------------------
# Deterministic oracle
# ----------------------------------------------------------------------------

@rank_or_tolerance()
def svd_truncated(
    a: np.ndarray,
    k: int = 0,
    tol: float = 0.0,
    limit: Optional[int] = None,
) -> SvdFactors:
    """
    Full Jacobi SVD truncated to k terms.

    In tolerance mode k is the smallest count with sigma_{k+1} < tol.

    Raises:
        DenseOracleLimitError: min(m, n) above ``limit`` (default: the kernel setting)
    """
    if limit is None:
        limit = kernel_settings().dense_oracle_limit
    if min(a.shape) > limit:
        raise DenseOracleLimitError(
            f"svd_truncated: min(m, n) = {min(a.shape)} exceeds the dense limit {limit}; "
            f"use the randomized routines"
        )
    if k > min(a.shape):
        raise DimensionMismatchError(
            "svd_truncated", a.shape, detail=f"rank {k} exceeds min(m, n) = {min(a.shape)}"
        )
    u, sigma, v = small_svd(a)
    if k == 0:
        below = np.flatnonzero(sigma < tol)
        k = int(below[0]) if below.size else sigma.size
    logger.debug(f"svd_truncated {a.shape[0]}x{a.shape[1]}: rank {k}")
    return _factors(u, sigma, v, k)


# ----------------------------------------------------------------------------
# Randomized, fixed rank
# ----------------------------------------------------------------------------

@track_performance(threshold_ms=60000)
def rsvd_basic(a: np.ndarray, k: int, p: int, rng: RngState) -> SvdFactors:
    """Single-pass sampling: Y = AG, Q = orth(Y), SVD of Q^T A, keep k"""
    l = _check_sample_size(a, k, p, "rsvd_basic")
    q = orth(matmul(a, gaussian_matrix(a.shape[1], l, rng)))
    b = matmul(q, a, trans_a=True)
    u_hat, sigma, v = small_svd(b)
    return _factors(matmul(q, u_hat), sigma, v, k)


def _range_basis(a: np.ndarray, l: int, q: int, s: int, rng: RngState) -> np.ndarray:
    return orth(sample_right(a, l, q, s, rng))


@track_performance(threshold_ms=60000)
def rsvd_v1(a: np.ndarray, k: int, p: int, q: int, s: int, rng: RngState) -> SvdFactors:
    """
    Randomized SVD finished through the eigendecomposition of B B^T.

    Cheapest finish, but it squares the conditioning of B.

    Raises:
        NumericalRankError: a kept eigenvalue is nonpositive or below 1e-28 of the largest
    """
    l = _check_sample_size(a, k, p, "rsvd_v1")
    q_mat = _range_basis(a, l, q, s, rng)
    return _finish_with_eig(q_mat, matmul(q_mat, a, trans_a=True), k)


@track_performance(threshold_ms=60000)
def rsvd_v2(a: np.ndarray, k: int, p: int, q: int, s: int, rng: RngState) -> SvdFactors:
    """Randomized SVD finished through a QR factorization of B^T = A^T Q"""
    l = _check_sample_size(a, k, p, "rsvd_v2")
    q_mat = _range_basis(a, l, q, s, rng)
    return _finish_with_qr(q_mat, matmul(a, q_mat, trans_a=True), k)


def svd_from_qb(qb: QbFactors, k: Optional[int] = None, vnum: SvdMethod = SvdMethod.QR) -> SvdFactors:
    """
    SVD of a QB factorization, truncated to k (default: the full QB rank).

    Raises:
        DimensionMismatchError: k greater than the rows of B
    """
    rows = qb.rank
    k = rows if k is None else k
    if k > rows or k < 0:
        raise DimensionMismatchError(
            "svd_from_qb", qb.b.shape, detail=f"rank {k} outside 0..{rows}"
        )
    m, n = qb.q.shape[0], qb.b.shape[1]
    if k == 0:
        return SvdFactors(freeze(np.zeros((m, 0))), np.zeros(0), freeze(np.zeros((n, 0))),
                          qb.tolerance_reached)
    if SvdMethod(vnum) is SvdMethod.BBT:
        factors = _finish_with_eig(qb.q, qb.b, k)
    else:
        factors = _finish_with_qr(qb.q, freeze(qb.b.T), k)
    if not qb.tolerance_reached:
        factors = SvdFactors(factors.u, factors.sigma, factors.v, tolerance_reached=False)
    return factors


def blocks_for_rank(k: int, p: int, b: int) -> int:
    """Number of b-wide blocks needed to reach k + p columns"""
    return max(1, math.ceil((k + p) / b))


@track_performance(threshold_ms=60000)
@rank_or_tolerance()
def svd_blockrand(
    a: np.ndarray,
    k: int = 0,
    p: int = 5,
    tol: float = 0.0,
    b: int = 10,
    max_blocks: int = 10,
    q: int = 0,
    vnum: SvdMethod = SvdMethod.QR,
    rng: Optional[RngState] = None,
) -> SvdFactors:
    """
    Blocked randomized SVD in fixed-rank or tolerance mode.

    Fixed rank runs ceil((k+p)/b) blocks without a tolerance and truncates to
    k; tolerance mode runs the blocked QB until ||A - QB||_F < tol and keeps
    every computed component.
    """
    rng = rng or RngState()
    if k >= 1:
        if k > min(a.shape):
            raise DimensionMismatchError(
                "svd_blockrand", a.shape, detail=f"rank {k} exceeds min(m, n) = {min(a.shape)}"
            )
        qb = qb_blocked(a, b, blocks_for_rank(k, p, b), tol=0.0, q=q, rng=rng)
        return svd_from_qb(qb, k, vnum)
    qb = qb_blocked(a, b, max_blocks, tol=tol, q=q, rng=rng)
    return svd_from_qb(qb, qb.rank, vnum)


def rsvd(a: np.ndarray, params: SketchParams, rng: Optional[RngState] = None) -> SvdFactors:
    """
    Randomized SVD selected by ``params``.

    Tolerance mode goes through blocked QB. Without power steps the QR finish
    is the single-pass routine.
    """
    rng = rng or params.rng()
    if params.k == 0:
        return svd_blockrand(
            a, k=0, tol=params.tol, b=params.block, max_blocks=params.max_blocks,
            q=params.q, vnum=params.vnum, rng=rng,
        )
    if params.q == 0 and params.vnum is SvdMethod.QR:
        return rsvd_basic(a, params.k, params.p, rng)
    if params.vnum is SvdMethod.BBT:
        return rsvd_v1(a, params.k, params.p, params.q, params.s, rng)
    return rsvd_v2(a, params.k, params.p, params.q, params.s, rng)


# ----------------------------------------------------------------------------
# Reference error values
# ----------------------------------------------------------------------------

def tail_floor(sigma: Sequence[float], k: int) -> float:
    """Best possible rank-k Frobenius error, sqrt(sum_{j>k} sigma_j^2)"""
    tail = np.asarray(sigma, dtype=np.float64)[k:]
    return float(math.sqrt(float(np.sum(tail * tail))))


def power_bound(k: int, n: int, q: int, sigma_next: float) -> float:
    """Spectral error bound (k n)^(1/(2(2q+1))) sigma_{k+1} for q power steps"""
    return float((k * n) ** (1.0 / (2 * (2 * q + 1))) * sigma_next)
