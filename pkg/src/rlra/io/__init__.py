"""Matrix files, test matrices, factor bundles and reports."""

from .binary_format import load_binary, load_spectrum, save_binary, save_spectrum, spectrum_path
from .factor_store import FactorBundle, load_factors, save_factors
from .generator import SpectrumSpec, gen_test_matrix
from .reports import ErrorReport, NnzReport, nnz_counts, nnz_report, verify, write_reports

__all__ = [
    "load_binary",
    "load_spectrum",
    "save_binary",
    "save_spectrum",
    "spectrum_path",
    "FactorBundle",
    "load_factors",
    "save_factors",
    "SpectrumSpec",
    "gen_test_matrix",
    "ErrorReport",
    "NnzReport",
    "nnz_counts",
    "nnz_report",
    "verify",
    "write_reports",
]
