"""
Synthetic test matrices with a prescribed spectrum.

A = U diag(sigma) V^T with U, V orthonormalized Gaussian matrices and
sigma_j = 10^(e_j), e_j evenly spaced from 0 down to the spectrum's end
exponent (type I: -0.5, type II: -2, type III: -3.5).
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from ..core.constants import SPECTRUM_EXPONENTS
from ..core.dense import RngState, gaussian_matrix, matmul, orth

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SpectrumSpec:
    """Singular value profile of a generated matrix"""
    kind: str
    end_exponent: float = 0.0
    exponents: Optional[Tuple[float, ...]] = None

    @classmethod
    def named(cls, kind: str) -> "SpectrumSpec":
        """Type "I", "II" or "III" """
        key = kind.upper()
        if key not in SPECTRUM_EXPONENTS:
            raise ValueError(f"unknown spectrum type {kind!r}; expected one of {sorted(SPECTRUM_EXPONENTS)}")
        return cls(key, SPECTRUM_EXPONENTS[key])

    @classmethod
    def decay(cls, end_exponent: float) -> "SpectrumSpec":
        """Custom logspace(0, end_exponent, r) profile"""
        if end_exponent > 0:
            raise ValueError(f"end exponent must be <= 0 for a nonincreasing spectrum, got {end_exponent}")
        return cls("custom", float(end_exponent))

    @classmethod
    def explicit(cls, exponents: Sequence[float]) -> "SpectrumSpec":
        """sigma_j = 10^(exponents[j]); the list must be nonincreasing"""
        values = tuple(float(e) for e in exponents)
        if not values or any(b > a for a, b in zip(values, values[1:])):
            raise ValueError("explicit exponents must be a nonempty nonincreasing list")
        return cls("custom", values[-1], values)

    def values(self, r: int) -> np.ndarray:
        """The r singular values, descending and strictly positive"""
        if self.exponents is not None:
            if len(self.exponents) != r:
                raise ValueError(f"spectrum lists {len(self.exponents)} exponents, matrix needs {r}")
            return np.power(10.0, np.array(self.exponents))
        return np.logspace(0.0, self.end_exponent, r)


def gen_test_matrix(m: int, n: int, spec: SpectrumSpec, rng: RngState) -> Tuple[np.ndarray, np.ndarray]:
    """
    Draw A = U diag(sigma) V^T with r = min(m, n).

    Returns:
        (A, sigma) with the exact singular values for oracle checks
    """
    if m < 1 or n < 1:
        raise ValueError(f"matrix dimensions must be positive, got {m}x{n}")
    r = min(m, n)
    sigma = spec.values(r)
    u = orth(gaussian_matrix(m, r, rng))
    v = orth(gaussian_matrix(n, r, rng))
    a = matmul(u * sigma, v, trans_b=True)
    logger.debug(f"Generated {m}x{n} type {spec.kind} matrix, sigma in [{sigma[-1]:.3e}, {sigma[0]:.3e}]")
    sigma.setflags(write=False)
    return a, sigma
