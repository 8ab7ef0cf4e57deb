"""
Unit tests for interpolative decompositions and CUR.
"""

import numpy as np
import pytest

from src.rlra.core.dense import RngState, freeze, frobenius_norm
from src.rlra.core.errors import DimensionMismatchError, RankDeficiencyError, RankModeError
from src.rlra.decompositions.interp import (
    cur,
    cur_blockrand,
    cur_rand,
    id_blockrand,
    id_bound,
    id_column,
    id_from_qb,
    id_rand,
    id_row,
    id_two_sided,
    linkage_matrix,
)
from src.rlra.decompositions.qb import qb_blocked
from src.rlra.decompositions.rsvd import tail_floor
from src.rlra.io.generator import SpectrumSpec, gen_test_matrix
from tests.conftest import low_rank_matrix, random_matrix


def dependent_columns():
    """[a, 2a, b] with ||2a|| > ||b||"""
    a = np.array([1.0, 1.0, 0.0, 0.0])
    b = np.array([0.0, 0.0, 1.0, 0.0])
    return freeze(np.column_stack([a, 2.0 * a, b]))


def random_shape_case(seed):
    """Gaussian matrix of a random shape up to 100 x 80 and a rank below min(m, n)"""
    draw = np.random.default_rng(1000 + seed)
    m, n = int(draw.integers(20, 101)), int(draw.integers(10, 81))
    return random_matrix(m, n, seed=seed), int(draw.integers(1, min(m, n)))


@pytest.fixture(scope="module")
def type_three_200():
    """200 x 200 matrix with spectrum logspace(0, -3.5, 200)."""
    a, _ = gen_test_matrix(200, 200, SpectrumSpec.named("III"), RngState(22))
    return a


class TestIdColumn:
    """Test the deterministic column ID."""

    def test_dependent_column_is_interpolated(self):
        """[a, 2a, b], k=2: skeleton {2a, b}, column a is half of 2a."""
        a = dependent_columns()
        factors = id_column(a, k=2)
        assert set(factors.skeleton.tolist()) == {1, 2}
        assert factors.skeleton[0] == 1
        assert np.allclose(factors.v[0], [0.5, 0.0], atol=1e-15)
        assert frobenius_norm(a - factors.reconstruct(a)) <= 1e-14
        assert factors.residual <= 1e-14

    def test_skeleton_rows_are_identity(self, type_three_matrix):
        a, _ = type_three_matrix
        factors = id_column(a, k=12)
        assert np.array_equal(factors.v[factors.skeleton], np.eye(12))

    def test_full_rank_is_exact(self):
        a = random_matrix(20, 12, seed=1)
        factors = id_column(a, k=12)
        assert frobenius_norm(a - factors.reconstruct(a)) <= 1e-12 * frobenius_norm(a)

    def test_residual_matches_reconstruction(self, type_three_matrix):
        """The trailing-block norm equals ||A - C V^T||_F."""
        a, _ = type_three_matrix
        for k in (5, 20, 40):
            factors = id_column(a, k=k)
            explicit = frobenius_norm(a - factors.reconstruct(a))
            assert factors.residual == pytest.approx(explicit, rel=1e-8)

    def test_error_nonincreasing_in_rank(self, type_two_matrix):
        a, _ = type_two_matrix
        residuals = [id_column(a, k=k).residual for k in range(1, 11)]
        assert all(later <= earlier for earlier, later in zip(residuals, residuals[1:]))

    def test_error_above_floor(self, type_two_matrix):
        a, sigma = type_two_matrix
        factors = id_column(a, k=10)
        assert factors.residual >= (1 - 1e-10) * tail_floor(sigma, 10)

    def test_tolerance_mode(self):
        a = freeze(np.diag([5.0, 3.0, 1.0]))
        factors = id_column(a, tol=2.0)
        assert factors.rank == 2
        assert factors.residual == pytest.approx(1.0)

    def test_ill_conditioned_block_is_stabilized(self):
        """diag(1, 1e-13, 1e-14), k=2: clamped solve and explicit residual."""
        a = freeze(np.diag([1.0, 1e-13, 1e-14]))
        factors = id_column(a, k=2)
        assert factors.stabilized
        assert factors.residual == pytest.approx(1e-14, rel=1e-6)

    def test_rank_contract(self):
        a = random_matrix(6, 6)
        with pytest.raises(RankModeError):
            id_column(a)
        with pytest.raises(RankModeError):
            id_column(a, k=2, tol=0.5)

    @pytest.mark.parametrize("seed", range(30))
    def test_residual_matches_reconstruction_random_shapes(self, seed):
        a, k = random_shape_case(seed)
        factors = id_column(a, k=k)
        explicit = frobenius_norm(a - factors.reconstruct(a))
        assert factors.residual == pytest.approx(explicit, rel=1e-9)

    def test_residual_matches_reconstruction_rectangular(self):
        a, _ = gen_test_matrix(80, 60, SpectrumSpec.named("II"), RngState(20))
        factors = id_column(a, k=12)
        assert factors.residual == pytest.approx(frobenius_norm(a - factors.reconstruct(a)), rel=1e-9)


class TestIdRowAndTwoSided:
    """Test row and two-sided IDs."""

    def test_row_id_is_transposed_column_id(self, type_two_matrix):
        a, _ = type_two_matrix
        rows = id_row(a, k=8)
        columns = id_column(a.T, k=8)
        assert rows.axis == "rows"
        assert rows.perm == columns.perm
        assert np.array_equal(rows.v, columns.v)
        assert frobenius_norm(a - rows.reconstruct(a)) == pytest.approx(columns.residual, rel=1e-8)

    def test_two_sided_error_equals_column_error(self, type_three_matrix):
        a, _ = type_three_matrix
        two_sided = id_two_sided(a, k=15)
        column = id_column(a, k=15)
        assert two_sided.residual == pytest.approx(column.residual, rel=1e-9)
        assert np.array_equal(two_sided.col_skeleton, column.skeleton)

    def test_two_sided_block_is_submatrix(self, type_two_matrix):
        a, _ = type_two_matrix
        factors = id_two_sided(a, k=6)
        block = factors.skeleton_block(a)
        assert block.shape == (6, 6)
        assert np.array_equal(block, a[np.ix_(factors.row_skeleton, factors.col_skeleton)])

    @pytest.mark.parametrize("seed", range(30))
    def test_two_sided_error_random_shapes(self, seed):
        a, k = random_shape_case(seed)
        assert id_two_sided(a, k=k).residual == pytest.approx(id_column(a, k=k).residual, rel=1e-9)

    def test_two_sided_error_rectangular(self):
        a, _ = gen_test_matrix(80, 60, SpectrumSpec.named("II"), RngState(20))
        assert id_two_sided(a, k=12).residual == pytest.approx(id_column(a, k=12).residual, rel=1e-9)


class TestCur:
    """Test CUR assembled from skeletons."""

    def test_factors_are_actual_rows_and_columns(self, type_three_matrix):
        a, _ = type_three_matrix
        factors = cur(a, k=10)
        assert np.array_equal(factors.c, a[:, factors.col_perm.head(10)])
        assert np.array_equal(factors.r, a[factors.row_perm.head(10), :])
        assert factors.u.shape == (10, 10)

    def test_error_at_least_id_error(self, type_two_matrix):
        a, _ = type_two_matrix
        for k in (5, 10, 20):
            assert cur(a, k=k).residual >= (1 - 1e-10) * id_column(a, k=k).residual

    def test_exact_rank(self):
        a = low_rank_matrix(40, 30, 6, seed=2)
        factors = cur(a, k=6)
        assert frobenius_norm(a - factors.reconstruct()) <= 1e-9 * frobenius_norm(a)

    def test_linkage_solves_normal_equations(self, type_three_matrix):
        """U minimizes ||U R - V^T||_F: the residual is orthogonal to the rows of R."""
        a, _ = type_three_matrix
        column_id = id_column(a, k=10)
        factors = cur(a, k=10)
        gap = factors.u @ factors.r - column_id.v.T
        normal = gap @ factors.r.T
        assert frobenius_norm(normal) <= 1e-8 * frobenius_norm(factors.r) * frobenius_norm(column_id.v)

    def test_rank_deficient_linkage(self):
        """Repeated skeleton rows name the row that collapsed."""
        r = freeze(np.array([[1.0, 2.0, 3.0], [1.0, 2.0, 3.0]]))
        v = freeze(np.eye(3)[:, :2])
        with pytest.raises(RankDeficiencyError) as excinfo:
            linkage_matrix(r, v, np.array([4, 7]))
        assert excinfo.value.index == 7

    @pytest.mark.parametrize("seed", range(5))
    def test_linkage_is_locally_optimal(self, type_three_matrix, seed):
        """Moving U by 1e-3 in a random direction never lowers ||V^T - U R||_F."""
        a, _ = type_three_matrix
        column_id = id_column(a, k=10)
        factors = cur(a, k=10)
        direction = random_matrix(10, 10, seed=seed)
        direction = direction / frobenius_norm(direction)
        base = frobenius_norm(column_id.v.T - factors.u @ factors.r)
        for step in (1e-3, -1e-3):
            moved = frobenius_norm(column_id.v.T - (factors.u + step * direction) @ factors.r)
            assert moved ** 2 >= base ** 2 * (1 - 1e-12)


class TestRandomizedId:
    """Test the sketched IDs."""

    def test_id_rand_close_to_deterministic(self, type_three_matrix):
        a, _ = type_three_matrix
        randomized = id_rand(a, 10, 5, 1, 1, RngState(1))
        deterministic = id_column(a, k=10)
        assert randomized.rank == 10
        assert randomized.residual == pytest.approx(frobenius_norm(a - randomized.reconstruct(a)))
        assert randomized.residual <= 3.0 * deterministic.residual

    def test_id_rand_exact_rank(self):
        a = low_rank_matrix(50, 40, 5, seed=3)
        factors = id_rand(a, 5, 3, 0, 1, RngState(2))
        assert factors.residual <= 1e-9 * frobenius_norm(a)

    def test_id_rand_arguments(self):
        a = random_matrix(10, 10)
        with pytest.raises(ValueError):
            id_rand(a, 0, 2, 0, 1, RngState())
        with pytest.raises(DimensionMismatchError):
            id_rand(a, 8, 5, 0, 1, RngState())

    def test_id_from_qb_bound(self, type_two_matrix):
        """Full-rank ID of B: error within [1 + sqrt(1 + 4k(n-k))] times the QB error."""
        a, _ = type_two_matrix
        qb = qb_blocked(a, 5, 3, rng=RngState(3))
        factors = id_from_qb(qb, a, qb.rank)
        bound = id_bound(qb.rank, a.shape[1], qb.residual_norm)
        assert factors.residual <= bound

    def test_id_from_qb_rank_range(self):
        a = random_matrix(20, 20, seed=4)
        qb = qb_blocked(a, 4, 1, rng=RngState(4))
        with pytest.raises(DimensionMismatchError):
            id_from_qb(qb, a, 5)
        with pytest.raises(DimensionMismatchError):
            id_from_qb(qb, a, 0)

    def test_id_bound(self):
        assert id_bound(2, 10, 1.0) == pytest.approx(1.0 + np.sqrt(65.0))

    def test_cur_rand(self, type_three_matrix):
        a, _ = type_three_matrix
        factors = cur_rand(a, 10, 5, 1, 1, RngState(5))
        assert factors.rank == 10
        assert np.array_equal(factors.c, a[:, factors.col_perm.head(10)])
        assert factors.residual == pytest.approx(frobenius_norm(a - factors.reconstruct()))

    @pytest.mark.slow
    def test_id_from_qb_bound_at_tolerance(self):
        """QB run to eps = 1e-3; the ID at the QB rank stays under the bound."""
        a, _ = gen_test_matrix(150, 150, SpectrumSpec.named("II"), RngState(21))
        for seed in range(20):
            qb = qb_blocked(a, 10, 15, tol=1e-3, rng=RngState(400 + seed))
            assert qb.tolerance_reached
            factors = id_from_qb(qb, a, qb.rank)
            assert factors.residual <= id_bound(qb.rank, a.shape[1], 1e-3)

    @pytest.mark.slow
    def test_id_rand_against_pivoted_qr(self, type_three_200):
        """Sketched pivots rarely beat pivoting on A itself and stay within 2x in median."""
        deterministic = id_column(type_three_200, k=20).residual
        residuals = np.array([
            id_rand(type_three_200, 20, 5, 1, 1, RngState(500 + seed)).residual for seed in range(10)
        ])
        assert np.count_nonzero(residuals >= deterministic - 1e-9 * deterministic) >= 9
        assert np.median(residuals) <= 2.0 * deterministic

    @pytest.mark.slow
    def test_cur_rand_against_deterministic(self, type_three_200):
        deterministic = cur(type_three_200, k=20).residual
        residuals = [
            cur_rand(type_three_200, 20, 5, 1, 1, RngState(600 + seed)).residual for seed in range(10)
        ]
        assert np.median(residuals) <= 3.0 * deterministic


class TestBlockRandomizedId:
    """Test IDs built on the blocked QB."""

    def test_fixed_rank(self, type_three_matrix):
        a, _ = type_three_matrix
        factors = id_blockrand(a, k=10, p=5, b=5, q=1, rng=RngState(6))
        assert factors.rank == 10
        assert factors.residual == pytest.approx(frobenius_norm(a - factors.reconstruct(a)))

    def test_tolerance_mode(self, type_three_matrix):
        a, _ = type_three_matrix
        tol = 0.1 * frobenius_norm(a)
        factors = id_blockrand(a, tol=tol, b=5, max_blocks=30, rng=RngState(7))
        assert factors.rank >= 1
        assert factors.residual == pytest.approx(frobenius_norm(a - factors.reconstruct(a)))

    def test_tolerance_above_norm(self):
        a = random_matrix(12, 10, seed=5)
        factors = id_blockrand(a, tol=2.0 * frobenius_norm(a))
        assert factors.rank == 0

    def test_cur_blockrand(self, type_two_matrix):
        a, _ = type_two_matrix
        factors = cur_blockrand(a, k=8, rng=RngState(8))
        assert factors.rank == 8
        assert factors.residual == pytest.approx(frobenius_norm(a - factors.reconstruct()))
        assert np.array_equal(factors.col_perm.head(8), id_blockrand(a, k=8, rng=RngState(8)).skeleton)
