"""
Unit tests for the randomized range samplers and SketchParams.
"""

import math
from unittest.mock import patch

import numpy as np
import pytest

from src.rlra.core.dense import RngState, freeze, frobenius_norm, gaussian_matrix, matmul, orth, small_svd
from src.rlra.core.errors import DimensionMismatchError, RankModeError
from src.rlra.decompositions import sketch as sketch_module
from src.rlra.decompositions.sketch import SketchParams, SvdMethod, sample_left, sample_right
from src.rlra.io.generator import SpectrumSpec, gen_test_matrix
from tests.conftest import random_matrix


class TestSketchParams:
    """Test the shared parameter record."""

    def test_defaults(self):
        """p=5, q=1, s=1 with the QR finish."""
        params = SketchParams(k=10)
        assert (params.p, params.q, params.s) == (5, 1, 1)
        assert params.vnum is SvdMethod.QR
        assert params.sample_size == 15

    def test_vnum_from_string(self):
        assert SketchParams(k=3, vnum="bbt").vnum is SvdMethod.BBT

    def test_rank_or_tolerance(self):
        """Exactly one halting mode."""
        with pytest.raises(RankModeError):
            SketchParams()
        with pytest.raises(RankModeError):
            SketchParams(k=5, tol=0.1)
        assert SketchParams(tol=0.1).k == 0

    def test_invalid_values(self):
        with pytest.raises(ValueError):
            SketchParams(k=5, q=-1)
        with pytest.raises(ValueError):
            SketchParams(k=5, s=0)
        with pytest.raises(ValueError):
            SketchParams(k=5, p=-1)
        with pytest.raises(ValueError):
            SketchParams(k=5, block=0)

    def test_check_shape(self):
        """k + p must fit in min(m, n)."""
        SketchParams(k=10, p=5).check_shape((15, 40))
        with pytest.raises(DimensionMismatchError, match="exceeds"):
            SketchParams(k=10, p=5).check_shape((14, 40))

    def test_as_dict(self):
        params = SketchParams(k=4, vnum="bbt", seed=3)
        data = params.as_dict()
        assert data["vnum"] == "bbt"
        assert data["k"] == 4 and data["seed"] == 3


class TestSampleRight:
    """Test column-space sampling with the power scheme."""

    def test_no_power_is_plain_product(self):
        """q=0: Y = A Omega bit for bit."""
        a = random_matrix(30, 20, seed=1)
        y = sample_right(a, 8, 0, 1, RngState(4))
        expected = matmul(a, gaussian_matrix(20, 8, RngState(4)))
        assert np.array_equal(y, expected)
        assert y.shape == (30, 8)

    def test_power_step_improves_range(self):
        """Same seed: q=1 leaves a smaller spectral residual than q=0."""
        a, _ = gen_test_matrix(100, 100, SpectrumSpec.named("I"), RngState(2))
        errors = []
        for q in (0, 1):
            basis = orth(sample_right(a, 15, q, 1, RngState(8)))
            errors.append(np.linalg.norm(a - basis @ (basis.T @ a), 2))
        assert errors[1] < errors[0]

    def test_orthonormal_input(self):
        """Flat spectrum: the basis is still orthonormal."""
        a = orth(random_matrix(40, 40, seed=3))
        basis = orth(sample_right(a, 10, 2, 1, RngState(1)))
        assert frobenius_norm(basis.T @ basis - np.eye(10)) <= 1e-12

    @pytest.mark.parametrize("s,expected_calls", [(1, 4), (2, 2), (3, 2), (4, 1)])
    def test_orthonormalization_schedule(self, s, expected_calls):
        """q=2 orthonormalizes before half-step j when (j-1) mod s == 0."""
        a = random_matrix(25, 20, seed=4)
        with patch.object(sketch_module, "orth", wraps=orth) as counted:
            sample_right(a, 5, 2, s, RngState(0))
        assert counted.call_count == expected_calls

    def test_schedule_preserves_range(self):
        """Any period spans the same subspace on a well-conditioned input."""
        a, _ = gen_test_matrix(50, 40, SpectrumSpec.named("I"), RngState(3))
        bases = [orth(sample_right(a, 6, 2, s, RngState(5))) for s in (1, 3)]
        projector_gap = bases[0] @ bases[0].T - bases[1] @ bases[1].T
        assert frobenius_norm(projector_gap) <= 1e-8

    def test_power_scheme_spectrum(self):
        """(A A^T)^q A has singular values sigma^(2q+1)."""
        a, sigma = gen_test_matrix(50, 40, SpectrumSpec.decay(-0.5), RngState(6))
        for q in (1, 2):
            powered = a
            for _ in range(q):
                powered = freeze(a @ (a.T @ powered))
            _, values, _ = small_svd(powered)
            assert np.allclose(values, sigma ** (2 * q + 1), rtol=1e-9)

    def test_errors(self):
        a = random_matrix(10, 8)
        with pytest.raises(DimensionMismatchError):
            sample_right(a, 9, 0, 1, RngState())
        with pytest.raises(ValueError):
            sample_right(a, 0, 0, 1, RngState())
        with pytest.raises(ValueError):
            sample_right(a, 3, -1, 1, RngState())
        with pytest.raises(ValueError):
            sample_right(a, 3, 1, 0, RngState())

    def test_deterministic(self):
        a = random_matrix(20, 20, seed=7)
        assert np.array_equal(
            sample_right(a, 5, 2, 1, RngState(11)),
            sample_right(a, 5, 2, 1, RngState(11)),
        )


class TestSampleLeft:
    """Test row-space sampling."""

    def test_no_power_is_plain_product(self):
        """q=0: Y = Omega A with Omega drawn as the transpose of an n x l draw."""
        a = random_matrix(30, 20, seed=1)
        y = sample_left(a, 6, 0, 1, RngState(9))
        omega_t = gaussian_matrix(30, 6, RngState(9))
        assert y.shape == (6, 20)
        assert np.allclose(y, matmul(omega_t.T, a), rtol=1e-13, atol=1e-13)

    def test_transpose_duality(self):
        """sample_left(A) equals sample_right(A^T) transposed."""
        a = random_matrix(25, 18, seed=2)
        left = sample_left(a, 7, 2, 1, RngState(3))
        right = sample_right(a.T, 7, 2, 1, RngState(3))
        assert np.array_equal(left, right.T)

    def test_captures_dominant_row_space(self):
        """Gapped 100x80 spectrum, l=15, q=2: top-10 right singular vectors are captured."""
        exponents = [0.0] * 10 + [-3.0] * 70
        rng = RngState(4)
        u = orth(gaussian_matrix(100, 80, rng))
        v = orth(gaussian_matrix(80, 80, rng))
        sigma = np.power(10.0, exponents)
        a = freeze((u * sigma) @ v.T)

        y = sample_left(a, 15, 2, 1, RngState(5))
        row_basis = orth(freeze(y.T))
        top = v[:, :10]
        sine = np.linalg.norm(top - row_basis @ (row_basis.T @ top), 2)
        assert sine <= 1e-3


class TestColumnNormStatistics:
    """Gaussian sketches preserve column norms in expectation."""

    @pytest.mark.slow
    def test_squared_norm_ratio_moments(self):
        """2000 trials, l=20: mean of ||Omega a||^2 / ||a||^2 is l, variance 2l."""
        l, trials = 20, 2000
        a = random_matrix(30, 1, seed=6)
        norm_sq = float(a[:, 0] @ a[:, 0])
        ratios = np.empty(trials)
        base = RngState(7)
        for t in range(trials):
            omega = gaussian_matrix(l, 30, base.substream(t))
            z = omega @ a[:, 0]
            ratios[t] = float(z @ z) / norm_sq
        assert abs(ratios.mean() - l) <= 4.0 * math.sqrt(2.0 * l / trials)
        assert abs(ratios.var() - 2.0 * l) <= 0.15 * 2.0 * l
