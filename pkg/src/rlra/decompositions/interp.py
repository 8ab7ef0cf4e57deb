"""
Skeleton factorizations: interpolative decompositions (ID) and CUR.

A column ID writes A ~ C V^T with C = A(:, J(1:k)) a subset of actual
columns and V an n x k interpolation matrix whose rows at J(1:k) are the
identity. Row IDs, two-sided IDs and CUR are assembled from column IDs.
"""

import logging
import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from ..core.constants import LINKAGE_RANK_TOLERANCE
from ..core.dense import (
    Permutation,
    PivotedQR,
    RngState,
    compact_qr,
    freeze,
    frobenius_norm,
    is_ill_conditioned_diagonal,
    matmul,
    pivoted_qr_partial,
    upper_tri_solve,
)
from ..core.errors import DimensionMismatchError, RankDeficiencyError
from ..utils.decorators import rank_or_tolerance, track_performance
from .qb import QbFactors, qb_blocked
from .rsvd import blocks_for_rank
from .sketch import sample_left

logger = logging.getLogger(__name__)

COLUMNS = "columns"
ROWS = "rows"


@dataclass(frozen=True)
class IdFactors:
    """
    One-sided interpolative decomposition.

    For ``axis == "columns"``: A ~ A(:, perm[:k]) V^T, V is n x k.
    For ``axis == "rows"``:    A ~ W A(perm[:k], :), W (stored in ``v``) is m x k.

    Attributes:
        residual: Frobenius norm of the approximation error
        stabilized: Interpolation coefficients went through the clamp rule
        tolerance_reached: False when a tolerance run could not meet its target
    """
    perm: Permutation
    v: np.ndarray
    rank: int
    residual: float
    stabilized: bool = False
    tolerance_reached: bool = True
    axis: str = COLUMNS

    @property
    def skeleton(self) -> np.ndarray:
        return self.perm.head(self.rank)

    def reconstruct(self, a: np.ndarray) -> np.ndarray:
        if self.axis == ROWS:
            return matmul(self.v, a[self.skeleton, :])
        return matmul(a[:, self.skeleton], self.v, trans_b=True)


@dataclass(frozen=True)
class TwoSidedIdFactors:
    """A ~ W A(row_perm[:k], col_perm[:k]) V^T"""
    row_perm: Permutation
    col_perm: Permutation
    w: np.ndarray
    v: np.ndarray
    rank: int
    residual: float

    @property
    def row_skeleton(self) -> np.ndarray:
        return self.row_perm.head(self.rank)

    @property
    def col_skeleton(self) -> np.ndarray:
        return self.col_perm.head(self.rank)

    def skeleton_block(self, a: np.ndarray) -> np.ndarray:
        return freeze(a[np.ix_(self.row_skeleton, self.col_skeleton)])

    def reconstruct(self, a: np.ndarray) -> np.ndarray:
        return matmul(matmul(self.w, self.skeleton_block(a)), self.v, trans_b=True)


@dataclass(frozen=True)
class CurFactors:
    """A ~ C U R with C = A(:, col_perm[:k]) and R = A(row_perm[:k], :)"""
    c: np.ndarray
    u: np.ndarray
    r: np.ndarray
    row_perm: Permutation
    col_perm: Permutation
    rank: int
    residual: float

    def reconstruct(self) -> np.ndarray:
        return matmul(matmul(self.c, self.u), self.r)


# ----------------------------------------------------------------------------
# Helpers
# ----------------------------------------------------------------------------

def interpolation_matrix(perm: Permutation, t: np.ndarray, k: int) -> np.ndarray:
    """V = P [I_k ; T^T]: identity rows at perm[:k], T^T rows at perm[k:]"""
    n = len(perm)
    v = np.zeros((n, k), dtype=np.float64, order="F")
    v[perm.head(k), np.arange(k)] = 1.0
    if n > k:
        v[perm.tail(k), :] = t.T
    return freeze(v)


def _id_from_pivoted(pqr: PivotedQR, k: int) -> IdFactors:
    """Interpolation matrix from the first k rows of a pivoted QR"""
    s11 = pqr.s1[:k, :k]
    s12 = pqr.s1[:k, k:]
    stabilized = is_ill_conditioned_diagonal(s11)
    t = upper_tri_solve(s11, s12) if k > 0 else np.zeros((0, s12.shape[1]))
    return IdFactors(
        perm=pqr.perm,
        v=interpolation_matrix(pqr.perm, t, k),
        rank=k,
        residual=pqr.residual,
        stabilized=stabilized,
        tolerance_reached=pqr.tolerance_reached,
    )


def _with_explicit_residual(factors: IdFactors, a: np.ndarray) -> IdFactors:
    residual = frobenius_norm(a - factors.reconstruct(a))
    return replace(factors, residual=residual)


def _empty_id(n: int, residual: float, tolerance_reached: bool = True) -> IdFactors:
    return IdFactors(
        perm=Permutation.identity(n),
        v=freeze(np.zeros((n, 0))),
        rank=0,
        residual=residual,
        tolerance_reached=tolerance_reached,
    )


def linkage_matrix(r: np.ndarray, v: np.ndarray, row_skeleton: np.ndarray) -> np.ndarray:
    """
    Least-squares U minimizing ||R^T U^T - V||_F through a QR of R^T.

    Raises:
        RankDeficiencyError: R^T rank deficient to working precision; names
            the skeleton row whose pivot collapsed
    """
    k = r.shape[0]
    if k == 0:
        return freeze(np.zeros((0, 0)))
    q_r, r_r = compact_qr(freeze(r.T))
    diagonal = np.abs(np.diagonal(r_r))
    weak = np.flatnonzero(diagonal <= LINKAGE_RANK_TOLERANCE * float(np.max(diagonal)))
    if weak.size:
        position = int(weak[0])
        row = int(row_skeleton[position])
        raise RankDeficiencyError(
            f"CUR linkage: skeleton row {row} (position {position}) makes R rank deficient",
            index=row,
        )
    ut = upper_tri_solve(r_r, matmul(q_r, v, trans_a=True), stabilize=False)
    return freeze(ut.T)


def cur_from_column_id(a: np.ndarray, column_id: IdFactors) -> CurFactors:
    """Full-rank row ID of the skeleton columns, then the linkage solve"""
    k = column_id.rank
    m = a.shape[0]
    if k == 0:
        return CurFactors(
            c=freeze(np.zeros((m, 0))), u=freeze(np.zeros((0, 0))), r=freeze(np.zeros((0, a.shape[1]))),
            row_perm=Permutation.identity(m), col_perm=column_id.perm, rank=0,
            residual=frobenius_norm(a),
        )
    c = freeze(a[:, column_id.skeleton])
    row_id = id_row(c, k=k)
    r = freeze(a[row_id.skeleton, :])
    u = linkage_matrix(r, column_id.v, row_id.skeleton)
    factors = CurFactors(
        c=c, u=u, r=r,
        row_perm=row_id.perm, col_perm=column_id.perm, rank=k, residual=0.0,
    )
    return replace(factors, residual=frobenius_norm(a - factors.reconstruct()))


def id_bound(k: int, n: int, eps: float) -> float:
    """Error bound [1 + sqrt(1 + 4k(n-k))] eps of an ID built on a QB of accuracy eps"""
    return float((1.0 + math.sqrt(1.0 + 4.0 * k * (n - k))) * eps)


# ----------------------------------------------------------------------------
# Deterministic
# ----------------------------------------------------------------------------

@rank_or_tolerance()
def id_column(a: np.ndarray, k: int = 0, tol: float = 0.0) -> IdFactors:
    """
    Column ID from a partial pivoted QR.

    The reported residual is the trailing-block norm of the QR, which equals
    ||A - C V^T||_F; it is recomputed explicitly when coefficients were clamped.
    """
    pqr = pivoted_qr_partial(a, k=k, tol=tol)
    factors = _id_from_pivoted(pqr, pqr.frank)
    if factors.stabilized:
        factors = _with_explicit_residual(factors, a)
    logger.debug(f"id_column {a.shape[0]}x{a.shape[1]}: rank {factors.rank}, residual {factors.residual:.3e}")
    return factors


@rank_or_tolerance()
def id_row(a: np.ndarray, k: int = 0, tol: float = 0.0) -> IdFactors:
    """Row ID, the column ID of A^T: A ~ W A(J(1:k), :)"""
    return replace(id_column(a.T, k=k, tol=tol), axis=ROWS)


@rank_or_tolerance()
def id_two_sided(a: np.ndarray, k: int = 0, tol: float = 0.0) -> TwoSidedIdFactors:
    """
    Column ID followed by a full-rank row ID of the skeleton columns.

    The row step is exact, so the error matches the column ID's.
    """
    column_id = id_column(a, k=k, tol=tol)
    rank = column_id.rank
    m = a.shape[0]
    if rank == 0:
        return TwoSidedIdFactors(
            row_perm=Permutation.identity(m), col_perm=column_id.perm,
            w=freeze(np.zeros((m, 0))), v=column_id.v, rank=0, residual=column_id.residual,
        )
    row_id = id_row(freeze(a[:, column_id.skeleton]), k=rank)
    factors = TwoSidedIdFactors(
        row_perm=row_id.perm, col_perm=column_id.perm,
        w=row_id.v, v=column_id.v, rank=rank, residual=0.0,
    )
    return replace(factors, residual=frobenius_norm(a - factors.reconstruct(a)))


@track_performance(threshold_ms=60000)
@rank_or_tolerance()
def cur(a: np.ndarray, k: int = 0, tol: float = 0.0) -> CurFactors:
    """CUR from the two-sided ID with a least-squares linkage matrix"""
    return cur_from_column_id(a, id_column(a, k=k, tol=tol))


# ----------------------------------------------------------------------------
# Randomized
# ----------------------------------------------------------------------------

@track_performance(threshold_ms=60000)
def id_rand(a: np.ndarray, k: int, p: int, q: int, s: int, rng: RngState) -> IdFactors:
    """
    Randomized column ID.

    Skeleton columns come from a full pivoted QR of the (k+p) x n row-space
    sample; only its first k rows are kept. The residual is measured on A.
    """
    m, n = a.shape
    if k < 1 or p < 0:
        raise ValueError(f"id_rand needs k >= 1 and p >= 0, got k={k}, p={p}")
    l = k + p
    if l > min(m, n):
        raise DimensionMismatchError(
            "id_rand", a.shape, detail=f"k + p = {l} exceeds min(m, n) = {min(m, n)}"
        )
    sample = sample_left(a, l, q, s, rng)
    pqr = pivoted_qr_partial(sample, k=min(sample.shape))
    return _with_explicit_residual(_id_from_pivoted(pqr, k), a)


def id_from_qb(qb: QbFactors, a: np.ndarray, k: int) -> IdFactors:
    """
    Column ID of B = Q^T A lifted to A.

    Raises:
        DimensionMismatchError: k greater than the rows of B
    """
    if not 1 <= k <= qb.rank:
        raise DimensionMismatchError(
            "id_from_qb", qb.b.shape, detail=f"rank {k} outside 1..{qb.rank}"
        )
    return _with_explicit_residual(id_column(qb.b, k=k), a)


@track_performance(threshold_ms=60000)
def cur_rand(a: np.ndarray, k: int, p: int, q: int, s: int, rng: RngState) -> CurFactors:
    """Randomized ID for the columns, deterministic full-rank row ID of C"""
    return cur_from_column_id(a, id_rand(a, k, p, q, s, rng))


@track_performance(threshold_ms=60000)
@rank_or_tolerance()
def id_blockrand(
    a: np.ndarray,
    k: int = 0,
    p: int = 5,
    tol: float = 0.0,
    b: int = 10,
    max_blocks: int = 10,
    q: int = 0,
    rng: Optional[RngState] = None,
) -> IdFactors:
    """
    Column ID built on a blocked QB.

    Fixed rank uses ceil((k+p)/b) blocks; tolerance mode runs the QB to
    ``tol`` and then stops the pivoted QR of B at the same tolerance.
    """
    rng = rng or RngState()
    if k >= 1:
        if k > min(a.shape):
            raise DimensionMismatchError(
                "id_blockrand", a.shape, detail=f"rank {k} exceeds min(m, n) = {min(a.shape)}"
            )
        qb = qb_blocked(a, b, blocks_for_rank(k, p, b), tol=0.0, q=q, rng=rng)
        return id_from_qb(qb, a, min(k, qb.rank))

    qb = qb_blocked(a, b, max_blocks, tol=tol, q=q, rng=rng)
    if qb.rank == 0:
        return _empty_id(a.shape[1], qb.residual_norm, qb.tolerance_reached)
    factors = _with_explicit_residual(id_column(qb.b, tol=tol), a)
    return replace(factors, tolerance_reached=factors.tolerance_reached and qb.tolerance_reached)


@rank_or_tolerance()
def cur_blockrand(
    a: np.ndarray,
    k: int = 0,
    p: int = 5,
    tol: float = 0.0,
    b: int = 10,
    max_blocks: int = 10,
    q: int = 0,
    rng: Optional[RngState] = None,
) -> CurFactors:
    """CUR on top of ``id_blockrand``"""
    column_id = id_blockrand(a, k=k, p=p, tol=tol, b=b, max_blocks=max_blocks, q=q, rng=rng)
    return cur_from_column_id(a, column_id)
