"""
Unit tests for factor bundles on disk and the benchmark sweeps.
"""

import csv
import io
import json

import numpy as np
import pytest

from src.rlra.core.dense import RngState
from src.rlra.core.errors import MatrixFormatError
from src.rlra.decompositions.interp import cur, id_column, id_row, id_two_sided
from src.rlra.decompositions.qb import qb_blocked
from src.rlra.decompositions.rsvd import svd_truncated
from src.rlra.decompositions.sketch import SketchParams
from src.rlra.io.bench import nnz_table, parse_int_list, run_bench, write_nnz_table
from src.rlra.io.factor_store import load_factors, manifest_path, save_factors
from src.rlra.io.reports import reconstruct


class TestFactorStore:
    """Test writing and reading factor bundles."""

    @pytest.mark.parametrize("build", [
        lambda a: svd_truncated(a, k=4),
        lambda a: id_column(a, k=4),
        lambda a: id_row(a, k=4),
        lambda a: id_two_sided(a, k=4),
        lambda a: cur(a, k=4),
        lambda a: qb_blocked(a, 4, 1, rng=RngState(1)),
    ])
    def test_reconstruction_survives(self, temp_workspace, type_two_matrix, build):
        a, _ = type_two_matrix
        factors = build(a)
        prefix = temp_workspace / "out" / "a_factors"
        path = save_factors(prefix, factors, a.shape, method="test", params={"k": 4})
        assert path == manifest_path(prefix)

        bundle = load_factors(prefix)
        assert bundle.shape == a.shape
        assert bundle.method == "test"
        assert bundle.params == {"k": 4}
        assert bundle.factors.rank == factors.rank
        assert np.array_equal(reconstruct(bundle.factors, a), reconstruct(factors, a))

    def test_files_written(self, temp_workspace, type_two_matrix):
        a, _ = type_two_matrix
        prefix = temp_workspace / "a_cur"
        save_factors(prefix, cur(a, k=3), a.shape, source="a.bin")
        names = sorted(p.name for p in temp_workspace.iterdir())
        assert names == [
            "a_cur.json", "a_cur_c.bin", "a_cur_col_perm.txt", "a_cur_r.bin",
            "a_cur_row_perm.txt", "a_cur_u.bin",
        ]
        manifest = json.loads((temp_workspace / "a_cur.json").read_text())
        assert manifest["kind"] == "cur"
        assert manifest["rank"] == 3
        assert manifest["source"] == "a.bin"
        assert len((temp_workspace / "a_cur_col_perm.txt").read_text().split()) == 100

    def test_rank_zero_has_no_matrix_files(self, temp_workspace):
        a = np.eye(5)
        factors = svd_truncated(a, tol=10.0)
        save_factors(temp_workspace / "empty", factors, a.shape)
        bundle = load_factors(temp_workspace / "empty.json")
        assert bundle.factors.rank == 0
        assert bundle.factors.u.shape == (5, 0)
        assert not list(temp_workspace.glob("*.bin"))

    def test_missing_manifest(self, temp_workspace):
        with pytest.raises(FileNotFoundError):
            load_factors(temp_workspace / "nothing")

    def test_invalid_manifest(self, temp_workspace):
        (temp_workspace / "bad.json").write_text(json.dumps({"kind": "svd"}))
        with pytest.raises(MatrixFormatError, match="invalid factor manifest"):
            load_factors(temp_workspace / "bad")

    def test_shape_disagreement(self, temp_workspace, type_two_matrix):
        a, _ = type_two_matrix
        save_factors(temp_workspace / "s", svd_truncated(a, k=2), a.shape)
        manifest = json.loads((temp_workspace / "s.json").read_text())
        manifest["matrices"]["u"]["shape"] = [99, 2]
        (temp_workspace / "s.json").write_text(json.dumps(manifest))
        with pytest.raises(MatrixFormatError, match="manifest says"):
            load_factors(temp_workspace / "s")


class TestBench:
    """Test the error-versus-rank sweep."""

    def test_parse_int_list(self):
        assert parse_int_list("5,10, 20") == [5, 10, 20]
        with pytest.raises(ValueError):
            parse_int_list("5,x")
        with pytest.raises(ValueError):
            parse_int_list(" , ")

    def test_error_decreases_with_rank(self, type_three_matrix):
        a, sigma = type_three_matrix
        reports = run_bench(a, [20, 5, 10], SketchParams(k=1, seed=3), sigma_true=sigma,
                            progress_mode="none", spectral_iters=20)
        assert [r.k for r in reports] == [5, 10, 20]
        errors = [r.rel_frobenius_error for r in reports]
        assert errors[0] > errors[1] > errors[2]
        assert all(r.method == "svd-rand" for r in reports)
        assert all(r.wall_time is not None and r.wall_time >= 0 for r in reports)

    def test_rows_independent_of_sweep(self, type_two_matrix):
        """Each rank restarts from the seed."""
        a, _ = type_two_matrix
        params = SketchParams(k=1, seed=4)
        sweep = run_bench(a, [4, 8], params, decomps=("id",), progress_mode="none", spectral_iters=20)
        single = run_bench(a, [8], params, decomps=("id",), progress_mode="none", spectral_iters=20)
        assert sweep[1].rel_frobenius_error == single[0].rel_frobenius_error

    def test_several_decompositions(self, type_two_matrix):
        a, _ = type_two_matrix
        reports = run_bench(a, [5], SketchParams(k=1), decomps=("svd", "id", "cur"),
                            method="blockrand", progress_mode="none", spectral_iters=20, density=0.1)
        assert [r.nnz.kind for r in reports] == ["svd", "id", "cur"]
        assert all(r.nnz.density == 0.1 for r in reports)

    def test_invalid_arguments(self, type_two_matrix):
        a, _ = type_two_matrix
        with pytest.raises(ValueError, match="unknown bench decomposition"):
            run_bench(a, [5], SketchParams(k=1), decomps=("qb",), progress_mode="none")
        with pytest.raises(ValueError):
            run_bench(a, [0], SketchParams(k=1), progress_mode="none")


class TestNnzTable:
    """Test the storage-only table."""

    def test_table_rows(self):
        reports = nnz_table(1000, 1000, [100, 50], density=0.05)
        assert [(r.k, r.kind) for r in reports][:3] == [(50, "svd"), (50, "id"), (50, "cur")]
        assert {r.kind: r.total for r in reports if r.k == 100} == {"svd": 200100, "id": 95100, "cur": 20000}

    def test_csv(self):
        stream = io.StringIO()
        assert write_nnz_table(nnz_table(10, 8, [2]), stream) == 3
        rows = list(csv.DictReader(io.StringIO(stream.getvalue())))
        assert rows[0]["kind"] == "svd"
        assert rows[0]["nnz_total"] == str(2 * (10 + 8 + 1))
        assert rows[0]["density"] == ""
