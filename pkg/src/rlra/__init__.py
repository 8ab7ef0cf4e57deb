"""
Randomized Low-Rank Toolkit

Randomized and deterministic low-rank factorizations of dense matrices.

Features:
- Randomized SVD with power iterations and two finishing methods
- Blocked, parallel and hierarchical randomized QB
- Column, row and two-sided interpolative decompositions
- CUR decompositions built on the ID
- Binary matrix files, synthetic test matrices and CSV error reports
"""

__version__ = "1.0.0"
__author__ = "RLRA Toolkit Contributors"
__email__ = "rlra-toolkit@example.com"
__license__ = "MIT"

# Export main classes and functions
from .core.config_manager import RlraConfig, get_config_manager
from .core.dense import Permutation, RngState
from .core.errors import RlraError
from .decompositions.interp import (
    CurFactors,
    IdFactors,
    TwoSidedIdFactors,
    cur,
    cur_blockrand,
    cur_rand,
    id_blockrand,
    id_column,
    id_rand,
    id_row,
    id_two_sided,
)
from .decompositions.qb import QbFactors, qb_blocked, qb_hierarchical, qb_parallel, qb_single
from .decompositions.rsvd import (
    SvdFactors,
    rsvd,
    rsvd_basic,
    rsvd_v1,
    rsvd_v2,
    svd_blockrand,
    svd_from_qb,
    svd_truncated,
)
from .decompositions.sketch import SketchParams, SvdMethod
from .io.binary_format import load_binary, save_binary
from .io.generator import SpectrumSpec, gen_test_matrix
from .io.reports import ErrorReport, nnz_report, verify

__all__ = [
    "__version__",
    "__author__",
    "__email__",
    "__license__",
    "RlraConfig",
    "get_config_manager",
    "Permutation",
    "RngState",
    "RlraError",
    "SketchParams",
    "SvdMethod",
    "SvdFactors",
    "QbFactors",
    "IdFactors",
    "TwoSidedIdFactors",
    "CurFactors",
    "svd_truncated",
    "rsvd",
    "rsvd_basic",
    "rsvd_v1",
    "rsvd_v2",
    "svd_from_qb",
    "svd_blockrand",
    "qb_single",
    "qb_blocked",
    "qb_parallel",
    "qb_hierarchical",
    "id_column",
    "id_row",
    "id_two_sided",
    "id_rand",
    "id_blockrand",
    "cur",
    "cur_rand",
    "cur_blockrand",
    "load_binary",
    "save_binary",
    "SpectrumSpec",
    "gen_test_matrix",
    "ErrorReport",
    "nnz_report",
    "verify",
]
