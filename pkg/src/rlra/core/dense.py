"""
Dense kernels every factorization is built on.

Matrices are float64 numpy arrays in column-major (Fortran) order and are
marked read-only once a kernel hands them out. The QR family is Householder
based, the small eigen/SVD kernels are Jacobi methods, and every kernel is a
pure function of its inputs (the random ones of their ``RngState``).
"""

import functools
import logging
import math
from dataclasses import dataclass, field
from typing import Any, List, Optional, Sequence, Tuple

import numpy as np

from .constants import (
    COEFFICIENT_CLAMP,
    DEFAULT_SEED,
    DEFAULT_SPECTRAL_ITERS,
    DIAGONAL_RATIO_LIMIT,
    HOUSEHOLDER_UNDERFLOW,
    JACOBI_EIG_THRESHOLD,
    JACOBI_SVD_THRESHOLD,
    MIN_SPECTRAL_ITERS,
    NORM_RECOMPUTE_RATIO,
    SYMMETRY_TOLERANCE,
)
from .errors import (
    ConvergenceError,
    DimensionMismatchError,
    NotSymmetricError,
    RankDeficiencyError,
)
from .parallel import column_blocks, kernel_settings, map_ordered
from ..utils.decorators import rank_or_tolerance

logger = logging.getLogger(__name__)

# (v, beta) with H = I - beta v v^T acting on rows j: of the working matrix;
# None marks a skipped (degenerate) column.
Reflector = Optional[Tuple[np.ndarray, float]]


# ----------------------------------------------------------------------------
# Construction helpers
# ----------------------------------------------------------------------------

def freeze(array: np.ndarray) -> np.ndarray:
    """Return ``array`` as a read-only column-major float64 matrix"""
    result = np.asfortranarray(array, dtype=np.float64)
    if result is array and result.flags.writeable:
        result = result.copy(order="F")
    result.setflags(write=False)
    return result


def as_dense(data: Any, name: str = "matrix", allow_empty: bool = False) -> np.ndarray:
    """
    Validate ``data`` as a DenseMatrix.

    Args:
        data: Anything numpy can turn into a 2-D real array
        name: Used in error messages
        allow_empty: Accept a zero row or column count

    Returns:
        Read-only column-major float64 array

    Raises:
        ValueError: not two-dimensional, empty, or containing NaN/Inf
    """
    if (
        isinstance(data, np.ndarray)
        and data.dtype == np.float64
        and data.ndim == 2
        and data.flags.f_contiguous
        and not data.flags.writeable
    ):
        matrix = data
    else:
        matrix = np.array(data, dtype=np.float64, order="F", copy=True)
    if matrix.ndim != 2:
        raise ValueError(f"{name} must be two-dimensional, got {matrix.ndim} dimension(s)")
    if not allow_empty and matrix.size == 0:
        raise ValueError(f"{name} must have positive row and column counts, got {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise ValueError(f"{name} contains NaN or infinite entries")
    matrix.setflags(write=False)
    return matrix


def _working_copy(matrix: np.ndarray) -> np.ndarray:
    return np.array(matrix, dtype=np.float64, order="F", copy=True)


# ----------------------------------------------------------------------------
# Permutation and random state
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class Permutation:
    """0-based index arrangement; skeleton indices come first"""
    indices: np.ndarray

    def __post_init__(self) -> None:
        indices = np.array(self.indices, dtype=np.int64).ravel()
        n = indices.size
        if n and not np.array_equal(np.sort(indices), np.arange(n)):
            raise ValueError("permutation indices must be a bijection on 0..n-1")
        indices.setflags(write=False)
        object.__setattr__(self, "indices", indices)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(np.arange(n))

    def __len__(self) -> int:
        return int(self.indices.size)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Permutation):
            return NotImplemented
        return bool(np.array_equal(self.indices, other.indices))

    def __hash__(self) -> int:
        return hash(self.indices.tobytes())

    def inverse(self) -> "Permutation":
        inverse = np.empty_like(self.indices)
        inverse[self.indices] = np.arange(len(self))
        return Permutation(inverse)

    def head(self, k: int) -> np.ndarray:
        """First ``k`` indices (the skeleton)"""
        return self.indices[:k]

    def tail(self, k: int) -> np.ndarray:
        """Indices after the skeleton"""
        return self.indices[k:]


class RngState:
    """
    Seeded Gaussian source.

    Wraps a PCG64 generator. ``substream(*key)`` derives an independent
    stream from the seed and a key, regardless of how much of this stream
    has been consumed, so parallel work units can own their randomness.
    """

    def __init__(self, seed: int = DEFAULT_SEED, key: Sequence[int] = ()):
        seed = int(seed)
        if not 0 <= seed < 2 ** 64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = seed
        self.key: Tuple[int, ...] = tuple(int(k) for k in key)
        sequence = np.random.SeedSequence(entropy=seed, spawn_key=self.key)
        self.generator = np.random.Generator(np.random.PCG64(sequence))

    def substream(self, *key: int) -> "RngState":
        return RngState(self.seed, self.key + tuple(key))

    def __repr__(self) -> str:
        return f"RngState(seed={self.seed}, key={self.key})"


def gaussian_matrix(m: int, n: int, rng: RngState) -> np.ndarray:
    """m x n matrix of i.i.d. standard normal deviates; advances ``rng``"""
    if m < 1 or n < 1:
        raise ValueError(f"gaussian_matrix needs positive dimensions, got {m}x{n}")
    # Filling an n x m C-ordered block gives column-major fill order.
    return freeze(rng.generator.standard_normal((n, m)).T)


# ----------------------------------------------------------------------------
# Products and norms
# ----------------------------------------------------------------------------

def matmul(
    a: np.ndarray,
    b: np.ndarray,
    trans_a: bool = False,
    trans_b: bool = False,
    threads: Optional[int] = None,
) -> np.ndarray:
    """
    op(A) @ op(B).

    With more than one thread the output is computed in contiguous column
    blocks; ``threads=1`` is the serial reference path.

    Raises:
        DimensionMismatchError: inner dimensions disagree
    """
    left = a.T if trans_a else a
    right = b.T if trans_b else b
    if left.ndim != 2 or right.ndim != 2 or left.shape[1] != right.shape[0]:
        raise DimensionMismatchError("matmul", left.shape, right.shape)

    settings = kernel_settings()
    workers = settings.threads if threads is None else threads
    cols = right.shape[1]
    if workers <= 1 or cols < settings.parallel_min_columns:
        return freeze(left @ right)

    out = np.empty((left.shape[0], cols), dtype=np.float64, order="F")

    def fill(block: Tuple[int, int]) -> None:
        start, stop = block
        out[:, start:stop] = left @ right[:, start:stop]

    map_ordered(fill, column_blocks(cols, workers), max_workers=workers)
    return freeze(out)


def frobenius_norm(matrix: np.ndarray) -> float:
    """Frobenius norm with scaling against overflow and pairwise summation"""
    if matrix.size == 0:
        return 0.0
    scale = float(np.max(np.abs(matrix)))
    if scale == 0.0 or not math.isfinite(scale):
        return scale
    scaled = np.ravel(matrix, order="K") / scale
    return scale * math.sqrt(float(np.sum(scaled * scaled)))


def _column_sq_norms(matrix: np.ndarray) -> np.ndarray:
    return np.einsum("ij,ij->j", matrix, matrix)


def spectral_norm_est(
    matrix: np.ndarray,
    iters: int = DEFAULT_SPECTRAL_ITERS,
    rng: Optional[RngState] = None,
) -> float:
    """
    Power-iteration estimate of the largest singular value.

    Used for reporting only. Needs at least 20 iterations.
    """
    if iters < MIN_SPECTRAL_ITERS:
        raise ValueError(f"spectral_norm_est needs iters >= {MIN_SPECTRAL_ITERS}, got {iters}")
    if matrix.size == 0:
        return 0.0
    rng = rng or RngState()
    x = gaussian_matrix(matrix.shape[1], 1, rng)[:, 0]
    x = x / frobenius_norm(x[:, None])
    for _ in range(iters):
        z = matrix.T @ (matrix @ x)
        size = frobenius_norm(z[:, None])
        if size == 0.0:
            return 0.0
        x = z / size
    return frobenius_norm((matrix @ x)[:, None])


# ----------------------------------------------------------------------------
# Householder QR
# ----------------------------------------------------------------------------

def _make_reflector(x: np.ndarray) -> Tuple[Reflector, float]:
    """Reflector mapping x onto alpha*e1; (None, x[0]) if x is numerically zero"""
    norm_x = frobenius_norm(x[:, None])
    if norm_x < HOUSEHOLDER_UNDERFLOW:
        return None, float(x[0])
    alpha = -math.copysign(norm_x, x[0])
    v = x.copy()
    v[0] -= alpha
    beta = 2.0 / float(v @ v)
    return (v, beta), alpha


def _apply_reflector(reflector: Reflector, block: np.ndarray) -> None:
    if reflector is None or block.size == 0:
        return
    v, beta = reflector
    block -= np.outer(beta * v, v @ block)


def _form_q(reflectors: List[Reflector], m: int, columns: Sequence[int]) -> np.ndarray:
    """H_0 H_1 ... H_{t-1} applied to the unit vectors e_j, j in ``columns``"""
    q = np.zeros((m, len(columns)), dtype=np.float64, order="F")
    q[list(columns), np.arange(len(columns))] = 1.0
    for j in range(len(reflectors) - 1, -1, -1):
        _apply_reflector(reflectors[j], q[j:, :])
    return q


def _fix_signs(q: np.ndarray, r: np.ndarray) -> None:
    """Flip Q columns / R rows so that diag(R) >= 0"""
    count = min(r.shape[0], q.shape[1])
    negative = np.flatnonzero(np.diagonal(r)[:count] < 0)
    q[:, negative] *= -1.0
    r[negative, :] *= -1.0


@dataclass(frozen=True)
class HouseholderQR:
    """Compact QR result with degenerate-column metadata"""
    q: np.ndarray
    r: np.ndarray
    degenerate_columns: Tuple[int, ...] = ()

    @property
    def degenerate(self) -> bool:
        return bool(self.degenerate_columns)


def householder_qr(matrix: np.ndarray) -> HouseholderQR:
    """
    Compact Householder QR, A = QR with diag(R) >= 0.

    A column whose remaining norm is below the underflow threshold gets no
    reflector: the matching column of Q is then the image of a canonical unit
    vector, orthogonal to all other columns, and the column index is reported
    in ``degenerate_columns``.
    """
    m, n = matrix.shape
    if m < n:
        raise DimensionMismatchError("householder_qr", matrix.shape, detail="needs rows >= cols")
    work = _working_copy(matrix)
    reflectors: List[Reflector] = []
    degenerate: List[int] = []

    for j in range(n):
        reflector, alpha = _make_reflector(work[j:, j])
        if reflector is None:
            degenerate.append(j)
        else:
            _apply_reflector(reflector, work[j:, j + 1:])
            work[j, j] = alpha
        work[j + 1:, j] = 0.0
        reflectors.append(reflector)

    r = np.triu(work[:n, :])
    q = _form_q(reflectors, m, range(n))
    _fix_signs(q, r)
    if degenerate:
        logger.warning(f"QR of {m}x{n} matrix: degenerate columns {degenerate}")
    return HouseholderQR(freeze(q), freeze(r), tuple(degenerate))


def compact_qr(matrix: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Economy QR, A (m x n, m >= n) = Q (m x n) R (n x n)"""
    result = householder_qr(matrix)
    return result.q, result.r


def orth(matrix: np.ndarray) -> np.ndarray:
    """Orthonormal basis of range(A), same shape as A"""
    return householder_qr(matrix).q


def orthonormal_complement(basis: np.ndarray, count: int) -> np.ndarray:
    """``count`` orthonormal columns orthogonal to the orthonormal ``basis``"""
    m, r = basis.shape
    if r + count > m:
        raise DimensionMismatchError(
            "orthonormal_complement", basis.shape, detail=f"cannot add {count} columns"
        )
    work = _working_copy(basis)
    reflectors: List[Reflector] = []
    for j in range(r):
        reflector, _ = _make_reflector(work[j:, j])
        _apply_reflector(reflector, work[j:, j + 1:])
        reflectors.append(reflector)
    return freeze(_form_q(reflectors, m, range(r, r + count)))


# ----------------------------------------------------------------------------
# Column-pivoted QR
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class PivotedQR:
    """
    Partial column-pivoted QR: A(:, perm) = Q1 S1 + remainder.

    ``residual`` is the Frobenius norm of the trailing block S22, measured
    exactly on the working matrix when the factorization halts.
    """
    q1: np.ndarray
    s1: np.ndarray
    perm: Permutation
    frank: int
    residual: float
    tolerance_reached: bool = True
    pivot_norms: Tuple[float, ...] = field(default_factory=tuple)

    @property
    def s11(self) -> np.ndarray:
        return self.s1[:, :self.frank]

    @property
    def s12(self) -> np.ndarray:
        return self.s1[:, self.frank:]


def _trailing_norm(work: np.ndarray, step: int) -> float:
    return frobenius_norm(work[step:, step:])


@rank_or_tolerance()
def pivoted_qr_partial(matrix: np.ndarray, k: int = 0, tol: float = 0.0) -> PivotedQR:
    """
    Businger-Golub column-pivoted Householder QR, halted early.

    Args:
        matrix: m x n input
        k: Fixed number of steps (k >= 1), or 0 for tolerance mode
        tol: Stop at the first step whose trailing block has Frobenius norm <= tol

    Returns:
        PivotedQR; in tolerance mode ``tolerance_reached`` is False when even
        min(m, n) steps leave a residual above ``tol``
    """
    m, n = matrix.shape
    limit = min(m, n)
    if k > limit:
        raise DimensionMismatchError(
            "pivoted_qr_partial", matrix.shape, detail=f"rank {k} exceeds min(m, n) = {limit}"
        )
    tolerance_mode = k == 0

    work = _working_copy(matrix)
    perm = np.arange(n)
    norms = _column_sq_norms(work)
    reference = norms.copy()
    reflectors: List[Reflector] = []
    pivot_norms: List[float] = []
    step = 0

    while step < (limit if tolerance_mode else k):
        if tolerance_mode and math.sqrt(max(float(np.sum(norms[step:])), 0.0)) <= tol:
            # The downdated estimate only triggers a check of the exact block.
            if _trailing_norm(work, step) <= tol:
                break
            norms[step:] = _column_sq_norms(work[step:, step:])
            reference[step:] = norms[step:]

        pivot = step + int(np.argmax(norms[step:]))
        if pivot != step:
            work[:, [step, pivot]] = work[:, [pivot, step]]
            perm[[step, pivot]] = perm[[pivot, step]]
            norms[[step, pivot]] = norms[[pivot, step]]
            reference[[step, pivot]] = reference[[pivot, step]]

        reflector, alpha = _make_reflector(work[step:, step])
        if reflector is not None:
            _apply_reflector(reflector, work[step:, step + 1:])
            work[step, step] = alpha
        work[step + 1:, step] = 0.0
        reflectors.append(reflector)
        pivot_norms.append(abs(float(work[step, step])))

        rest = slice(step + 1, n)
        norms[rest] -= work[step, rest] ** 2
        stale = np.flatnonzero(norms[rest] <= (NORM_RECOMPUTE_RATIO ** 2) * reference[rest])
        if stale.size:
            columns = stale + step + 1
            fresh = _column_sq_norms(work[step + 1:, columns])
            norms[columns] = fresh
            reference[columns] = fresh
        step += 1

    residual = _trailing_norm(work, step)
    tolerance_reached = residual <= tol if tolerance_mode else True
    if tolerance_mode and not tolerance_reached:
        logger.warning(
            f"Pivoted QR: tolerance {tol:.3e} not reached after {step} steps "
            f"(residual {residual:.3e})"
        )
    logger.debug(f"Pivoted QR of {m}x{n}: halted at step {step}, residual {residual:.3e}")

    s1 = work[:step, :].copy(order="F")
    s1[:, :step] = np.triu(s1[:, :step])
    q1 = _form_q(reflectors, m, range(step))
    _fix_signs(q1, s1)
    return PivotedQR(
        q1=freeze(q1),
        s1=freeze(s1),
        perm=Permutation(perm),
        frank=step,
        residual=residual,
        tolerance_reached=tolerance_reached,
        pivot_norms=tuple(pivot_norms),
    )


# ----------------------------------------------------------------------------
# Jacobi kernels
# ----------------------------------------------------------------------------

@functools.lru_cache(maxsize=64)
def round_robin_pairs(n: int) -> List[Tuple[np.ndarray, np.ndarray]]:
    """
    One cyclic sweep as n-1 rounds of disjoint (p, q) pairs, p < q.

    Rotations inside a round touch disjoint rows and columns, so they can be
    applied together with the same result as one after another.
    """
    players = list(range(n)) + ([-1] if n % 2 else [])
    size = len(players)
    rounds = []
    for _ in range(size - 1):
        ps, qs = [], []
        for i in range(size // 2):
            a, b = players[i], players[size - 1 - i]
            if a >= 0 and b >= 0:
                ps.append(min(a, b))
                qs.append(max(a, b))
        rounds.append((np.array(ps, dtype=np.int64), np.array(qs, dtype=np.int64)))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def _rotation(diag_p: np.ndarray, diag_q: np.ndarray, off: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """(c, s) annihilating ``off`` in the symmetric 2x2 block [[p, off], [off, q]]"""
    active = off != 0.0
    safe_off = np.where(active, off, 1.0)
    tau = (diag_q - diag_p) / (2.0 * safe_off)
    sign = np.where(tau >= 0.0, 1.0, -1.0)
    t = sign / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
    t = np.where(active, t, 0.0)
    c = 1.0 / np.sqrt(1.0 + t * t)
    return c, t * c


def _rotate_columns(matrix: np.ndarray, p: np.ndarray, q: np.ndarray, c: np.ndarray, s: np.ndarray) -> None:
    col_p = matrix[:, p]
    col_q = matrix[:, q]
    matrix[:, p] = c * col_p - s * col_q
    matrix[:, q] = s * col_p + c * col_q


def sym_eig(
    matrix: np.ndarray,
    max_sweeps: Optional[int] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Cyclic Jacobi eigendecomposition of a symmetric matrix.

    ``max_sweeps`` defaults to the configured kernel setting.

    Returns:
        (U, d) with eigenvalues ``d`` in descending order and matching
        eigenvector columns in ``U``

    Raises:
        NotSymmetricError: asymmetry above 1e-12 relative
        ConvergenceError: sweep cap reached
    """
    if max_sweeps is None:
        max_sweeps = kernel_settings().eig_max_sweeps
    n, cols = matrix.shape
    if n != cols:
        raise DimensionMismatchError("sym_eig", matrix.shape, detail="matrix must be square")
    scale = frobenius_norm(matrix)
    asymmetry = frobenius_norm(matrix - matrix.T)
    if asymmetry > SYMMETRY_TOLERANCE * scale:
        raise NotSymmetricError(
            f"sym_eig: relative asymmetry {asymmetry / scale:.3e} exceeds {SYMMETRY_TOLERANCE:g}"
        )

    a = np.asfortranarray(0.5 * (matrix + matrix.T))
    u = np.eye(n, order="F")
    rounds = round_robin_pairs(n)
    mask = ~np.eye(n, dtype=bool)

    for sweep in range(max_sweeps + 1):
        off_norm = math.sqrt(float(np.sum(a[mask] ** 2))) if n > 1 else 0.0
        if off_norm <= JACOBI_EIG_THRESHOLD * scale:
            logger.debug(f"sym_eig {n}x{n}: converged after {sweep} sweeps")
            break
        if sweep == max_sweeps:
            raise ConvergenceError("sym_eig", max_sweeps, off_norm)
        for p, q in rounds:
            off = a[p, q]
            c, s = _rotation(a[p, p], a[q, q], off)
            _rotate_columns(a, p, q, c, s)
            row_p = a[p, :]
            row_q = a[q, :]
            a[p, :] = c[:, None] * row_p - s[:, None] * row_q
            a[q, :] = s[:, None] * row_p + c[:, None] * row_q
            a[p, q] = 0.0
            a[q, p] = 0.0
            _rotate_columns(u, p, q, c, s)

    d = np.diagonal(a).copy()
    order = np.argsort(-d, kind="stable")
    return freeze(u[:, order]), d[order]


def small_svd(
    matrix: np.ndarray,
    max_sweeps: Optional[int] = None,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    One-sided (Hestenes) Jacobi SVD, M = U diag(sigma) V^T.

    Economy sized: U is m x r, V is n x r with r = min(m, n); sigma is
    descending and nonnegative.

    Raises:
        ConvergenceError: sweep cap reached
    """
    if max_sweeps is None:
        max_sweeps = kernel_settings().svd_max_sweeps
    m, n = matrix.shape
    if m < n:
        v, sigma, u = small_svd(matrix.T, max_sweeps)
        return u, sigma, v

    work = _working_copy(matrix)
    v = np.eye(n, order="F")
    rounds = round_robin_pairs(n)
    threshold = JACOBI_SVD_THRESHOLD * max(1.0, math.sqrt(m))

    for sweep in range(max_sweeps + 1):
        worst = 0.0
        rotated = False
        for p, q in rounds:
            alpha = _column_sq_norms(work[:, p])
            beta = _column_sq_norms(work[:, q])
            gamma = np.einsum("ij,ij->j", work[:, p], work[:, q])
            scale = np.sqrt(alpha * beta)
            ratio = np.divide(np.abs(gamma), scale, out=np.zeros_like(gamma), where=scale > 0)
            worst = max(worst, float(np.max(ratio, initial=0.0)))
            active = ratio > threshold
            if not np.any(active):
                continue
            rotated = True
            c, s = _rotation(alpha, beta, np.where(active, gamma, 0.0))
            _rotate_columns(work, p, q, c, s)
            _rotate_columns(v, p, q, c, s)
        if not rotated:
            logger.debug(f"small_svd {m}x{n}: converged after {sweep} sweeps")
            break
        if sweep == max_sweeps:
            raise ConvergenceError("small_svd", max_sweeps, worst)

    sigma = np.sqrt(_column_sq_norms(work))
    order = np.argsort(-sigma, kind="stable")
    sigma = sigma[order]
    work = work[:, order]
    v = v[:, order]

    nonzero = int(np.count_nonzero(sigma > HOUSEHOLDER_UNDERFLOW))
    u = np.empty((m, n), dtype=np.float64, order="F")
    u[:, :nonzero] = work[:, :nonzero] / sigma[:nonzero]
    if nonzero < n:
        u[:, nonzero:] = orthonormal_complement(u[:, :nonzero], n - nonzero)
        sigma[nonzero:] = 0.0
    return freeze(u), sigma, freeze(v)


# ----------------------------------------------------------------------------
# Triangular solve
# ----------------------------------------------------------------------------

def is_ill_conditioned_diagonal(s11: np.ndarray) -> bool:
    """True when the spread of |diag(S11)| exceeds the stabilization limit"""
    diagonal = np.abs(np.diagonal(s11))
    if diagonal.size == 0:
        return False
    smallest = float(np.min(diagonal))
    return smallest == 0.0 or float(np.max(diagonal)) / smallest > DIAGONAL_RATIO_LIMIT


def upper_tri_solve(s11: np.ndarray, s12: np.ndarray, stabilize: bool = True) -> np.ndarray:
    """
    Back substitution for S11 T = S12.

    With ``stabilize`` and an ill-conditioned diagonal, entries of T are
    clamped to +/- 1e4.

    Raises:
        RankDeficiencyError: a diagonal entry of S11 is zero
    """
    k = s11.shape[0]
    if s11.shape != (k, k) or s12.shape[0] != k:
        raise DimensionMismatchError("upper_tri_solve", s11.shape, s12.shape)
    diagonal = np.diagonal(s11)
    zero = np.flatnonzero(np.abs(diagonal) < HOUSEHOLDER_UNDERFLOW)
    if zero.size:
        raise RankDeficiencyError(
            f"upper_tri_solve: zero diagonal entry at position {int(zero[0])}", index=int(zero[0])
        )

    t = np.zeros(s12.shape, dtype=np.float64, order="F")
    for i in range(k - 1, -1, -1):
        t[i, :] = (s12[i, :] - s11[i, i + 1:] @ t[i + 1:, :]) / diagonal[i]

    if stabilize and is_ill_conditioned_diagonal(s11):
        clamped = int(np.count_nonzero(np.abs(t) > COEFFICIENT_CLAMP))
        if clamped:
            logger.warning(f"Clamped {clamped} interpolation coefficients to +/-{COEFFICIENT_CLAMP:g}")
            np.clip(t, -COEFFICIENT_CLAMP, COEFFICIENT_CLAMP, out=t)
    return freeze(t)
