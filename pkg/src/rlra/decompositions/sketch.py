"""
Randomized range samplers with the power scheme.

``sample_right`` returns (A A^T)^q A Omega, re-orthonormalizing the
intermediate samples every ``s`` half-multiplications; ``sample_left`` is the
row-space mirror, Omega A (A^T A)^q.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Tuple

import numpy as np

from ..core.constants import (
    DEFAULT_BLOCK_SIZE,
    DEFAULT_MAX_BLOCKS,
    DEFAULT_ORTH_PERIOD,
    DEFAULT_OVERSAMPLING,
    DEFAULT_POWER_ITERS,
    DEFAULT_SEED,
)
from ..core.dense import RngState, freeze, gaussian_matrix, matmul, orth
from ..core.errors import DimensionMismatchError
from ..utils.decorators import check_rank_or_tolerance

logger = logging.getLogger(__name__)


class SvdMethod(Enum):
    """How the small factor B is turned into an SVD"""
    QR = "qr"    # QR of B^T, then Jacobi SVD of R
    BBT = "bbt"  # eigendecomposition of B B^T


@dataclass(frozen=True)
class SketchParams:
    """
    Knobs shared by the randomized routines.

    Attributes:
        k: Target rank (0 selects tolerance mode)
        p: Oversampling
        q: Power iterations
        s: Orthonormalization period of the power loop
        tol: Absolute Frobenius tolerance (tolerance mode only)
        block: Block size b of the blocked QB schemes
        max_blocks: Block cap M
        vnum: Finishing method for SVDs
        seed: RNG seed
    """
    k: int = 0
    p: int = DEFAULT_OVERSAMPLING
    q: int = DEFAULT_POWER_ITERS
    s: int = DEFAULT_ORTH_PERIOD
    tol: float = 0.0
    block: int = DEFAULT_BLOCK_SIZE
    max_blocks: int = DEFAULT_MAX_BLOCKS
    vnum: SvdMethod = SvdMethod.QR
    seed: int = DEFAULT_SEED

    def __post_init__(self) -> None:
        if isinstance(self.vnum, str):
            object.__setattr__(self, "vnum", SvdMethod(self.vnum))
        check_rank_or_tolerance(self.k, self.tol)
        validate_power_params(self.q, self.s)
        if self.p < 0:
            raise ValueError(f"oversampling p must be nonnegative, got {self.p}")
        if self.block < 1 or self.max_blocks < 1:
            raise ValueError("block size and max_blocks must be at least 1")

    @property
    def sample_size(self) -> int:
        """l = k + p"""
        return self.k + self.p

    def check_shape(self, shape: Tuple[int, int]) -> None:
        """Require k + p <= min(m, n) in fixed-rank mode"""
        if self.k >= 1 and self.sample_size > min(shape):
            raise DimensionMismatchError(
                "sketch", shape,
                detail=f"k + p = {self.sample_size} exceeds min(m, n) = {min(shape)}",
            )

    def rng(self) -> RngState:
        return RngState(self.seed)

    def as_dict(self) -> dict:
        return {
            "k": self.k, "p": self.p, "q": self.q, "s": self.s, "tol": self.tol,
            "block": self.block, "max_blocks": self.max_blocks,
            "vnum": self.vnum.value, "seed": self.seed,
        }


def validate_power_params(q: int, s: int) -> None:
    if q < 0:
        raise ValueError(f"power iterations q must be nonnegative, got {q}")
    if s < 1:
        raise ValueError(f"orthonormalization period s must be at least 1, got {s}")


def power_iterate(a: np.ndarray, y: np.ndarray, q: int, s: int) -> np.ndarray:
    """
    Apply q rounds of Y <- A A^T Y to an existing m x l sample.

    Y is orthonormalized before A^T Y when (2j-2) mod s == 0 and the
    intermediate Z before A Z when (2j-1) mod s == 0, j = 1..q.
    """
    for j in range(1, q + 1):
        if (2 * j - 2) % s == 0:
            y = orth(y)
        z = matmul(a, y, trans_a=True)
        if (2 * j - 1) % s == 0:
            z = orth(z)
        y = matmul(a, z)
    return y


def sample_right(a: np.ndarray, l: int, q: int, s: int, rng: RngState) -> np.ndarray:
    """
    Column-space sample Y = (A A^T)^q A Omega, m x l.

    Raises:
        DimensionMismatchError: l > min(m, n)
    """
    m, n = a.shape
    if l < 1:
        raise ValueError(f"sample size must be at least 1, got {l}")
    if l > min(m, n):
        raise DimensionMismatchError(
            "sample_right", a.shape, detail=f"sample size {l} exceeds min(m, n) = {min(m, n)}"
        )
    validate_power_params(q, s)

    y = matmul(a, gaussian_matrix(n, l, rng))
    y = power_iterate(a, y, q, s)
    logger.debug(f"Sampled {m}x{n} matrix: l={l}, q={q}, s={s}")
    return y


def sample_left(a: np.ndarray, l: int, q: int, s: int, rng: RngState) -> np.ndarray:
    """Row-space sample Y = Omega A (A^T A)^q, l x n"""
    return freeze(sample_right(a.T, l, q, s, rng).T)
