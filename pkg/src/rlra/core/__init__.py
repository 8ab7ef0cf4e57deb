"""Core components: dense kernels, configuration and errors."""

from .config_manager import RlraConfig, get_config, get_config_manager
from .dense import (
    HouseholderQR,
    Permutation,
    PivotedQR,
    RngState,
    compact_qr,
    householder_qr,
    matmul,
    orth,
    pivoted_qr_partial,
    small_svd,
    spectral_norm_est,
    sym_eig,
    upper_tri_solve,
)
from .errors import (
    ConvergenceError,
    DenseOracleLimitError,
    DimensionMismatchError,
    MatrixFormatError,
    NotSymmetricError,
    NumericalRankError,
    RankDeficiencyError,
    RankModeError,
    RlraError,
)
from .parallel import KernelSettings, configure_kernels, kernel_settings

__all__ = [
    "RlraConfig",
    "get_config",
    "get_config_manager",
    "HouseholderQR",
    "Permutation",
    "PivotedQR",
    "RngState",
    "compact_qr",
    "householder_qr",
    "matmul",
    "orth",
    "pivoted_qr_partial",
    "small_svd",
    "spectral_norm_est",
    "sym_eig",
    "upper_tri_solve",
    "ConvergenceError",
    "DenseOracleLimitError",
    "DimensionMismatchError",
    "MatrixFormatError",
    "NotSymmetricError",
    "NumericalRankError",
    "RankDeficiencyError",
    "RankModeError",
    "RlraError",
    "KernelSettings",
    "configure_kernels",
    "kernel_settings",
]
