"""
Shared pytest fixtures for the randomized low-rank toolkit tests.

Provides seeded test matrices with known spectra, temporary workspaces and
resets of the process-wide kernel and configuration state.
"""

import shutil
import tempfile
from pathlib import Path

import numpy as np
import pytest

from src.rlra.core import config_manager as config_module
from src.rlra.core import parallel as parallel_module
from src.rlra.core.dense import RngState, freeze
from src.rlra.io.generator import SpectrumSpec, gen_test_matrix


@pytest.fixture
def temp_workspace():
    """Create temporary workspace directory."""
    workspace = tempfile.mkdtemp()
    yield Path(workspace)
    shutil.rmtree(workspace, ignore_errors=True)


@pytest.fixture(autouse=True)
def reset_global_state(monkeypatch):
    """Serial kernels, default sweep caps and a fresh config manager for every test."""
    monkeypatch.delenv("RLRA_THREADS", raising=False)
    monkeypatch.delenv("RLRA_LOG_LEVEL", raising=False)
    monkeypatch.setattr(parallel_module, "_settings", parallel_module.KernelSettings())
    monkeypatch.setattr(config_module, "_config_manager", None)
    yield


def low_rank_matrix(m: int, n: int, rank: int, seed: int = 0) -> np.ndarray:
    """Random matrix of exact rank ``rank``."""
    rng = np.random.default_rng(seed)
    return freeze(rng.standard_normal((m, rank)) @ rng.standard_normal((rank, n)))


def random_matrix(m: int, n: int, seed: int = 0) -> np.ndarray:
    return freeze(np.random.default_rng(seed).standard_normal((m, n)))


@pytest.fixture
def type_one_matrix():
    """200 x 200 matrix with spectrum logspace(0, -0.5, 200)."""
    return gen_test_matrix(200, 200, SpectrumSpec.named("I"), RngState(11))


@pytest.fixture
def type_two_matrix():
    """100 x 100 matrix with spectrum logspace(0, -2, 100)."""
    return gen_test_matrix(100, 100, SpectrumSpec.named("II"), RngState(12))


@pytest.fixture
def type_three_matrix():
    """150 x 150 matrix with spectrum logspace(0, -3.5, 150)."""
    return gen_test_matrix(150, 150, SpectrumSpec.named("III"), RngState(13))
