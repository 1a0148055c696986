"""
Pytest configuration and shared fixtures.

This module provides common fixtures:
- Synthetic data matrices (noiseless low-rank curves, small images)
- Criteria, K grids and seeded RNG specs
- An in-memory OpenTelemetry meter so metrics never reach the console
"""
import logging

import numpy as np
import pytest
from opentelemetry.sdk.metrics import MeterProvider
from opentelemetry.sdk.metrics.export import InMemoryMetricReader

from src.core.rng import RngSpec, RngStream
from src.models.data_matrix import DataMatrix
from src.models.evaluation import Criterion, KGrid
from src.models.grid import Grid
from src.repositories.matrix_repository import write_csv_array
from src.services.evaluation_service import EvaluationService
from src.services.metrics_service import MetricsService


def low_rank_curves(n: int, t: int, rank: int, seed: int = 0) -> np.ndarray:
    """Noiseless curves spanned by the first `rank` of five low harmonics (zero mean, equal norm)."""
    s = np.arange(t) / t
    basis = np.vstack([
        np.sin(2 * np.pi * s),
        np.cos(2 * np.pi * s),
        np.sin(4 * np.pi * s),
        np.cos(4 * np.pi * s),
        np.sin(6 * np.pi * s),
    ])[:rank]
    coefficients = np.random.default_rng(seed).uniform(-1.0, 1.0, size=(n, rank))
    return coefficients @ basis


# ==================== Data Fixtures ====================

@pytest.fixture
def rank5_matrix() -> DataMatrix:
    """60 noiseless rank-5 curves on 32 grid points."""
    return DataMatrix(values=low_rank_curves(60, 32, 5), grid=Grid.one_d(32))


@pytest.fixture
def small_matrix() -> DataMatrix:
    """Twelve random curves of length 16 with string row ids."""
    values = np.random.default_rng(7).normal(size=(12, 16))
    return DataMatrix(values=values, grid=Grid.one_d(16), row_ids=tuple(f"r{i}" for i in range(12)))


@pytest.fixture
def image_matrix() -> DataMatrix:
    """Ten smooth 8 x 8 images flattened row-major."""
    rng = np.random.default_rng(3)
    r, c = np.meshgrid(np.linspace(0, 1, 8), np.linspace(0, 1, 8), indexing="ij")
    images = [a * np.sin(np.pi * r) + b * np.cos(np.pi * c) + 0.5 for a, b in rng.uniform(0.5, 1.5, size=(10, 2))]
    return DataMatrix(values=np.array([im.ravel() for im in images]), grid=Grid.two_d(8, 8))


# ==================== Evaluation Fixtures ====================

@pytest.fixture
def criterion() -> Criterion:
    return Criterion(tolerance=0.05, attainment=0.95, user_quantile=0.9)


@pytest.fixture
def k_grid() -> KGrid:
    return KGrid(start=1, stop=8, step=1)


@pytest.fixture
def rng() -> RngSpec:
    return RngSpec(1, RngStream.FOLD_SHUFFLE)


@pytest.fixture
def metrics_reader() -> InMemoryMetricReader:
    return InMemoryMetricReader()


@pytest.fixture
def metrics_service(metrics_reader) -> MetricsService:
    """MetricsService bound to a private meter provider."""
    provider = MeterProvider(metric_readers=[metrics_reader])
    return MetricsService(meter=provider.get_meter("clare.tests"))


@pytest.fixture
def evaluation_service(metrics_service) -> EvaluationService:
    return EvaluationService(threads=1, metrics=metrics_service)


# ==================== File Fixtures ====================

@pytest.fixture
def rank5_csv(tmp_path, rank5_matrix):
    """The rank-5 curves as a CSV file with an id column and a header."""
    path = tmp_path / "rank5.csv"
    ids = [f"curve{i:03d}" for i in range(rank5_matrix.n)]
    write_csv_array(path, rank5_matrix.values, ["id"] + [f"t{j + 1}" for j in range(rank5_matrix.t)], row_ids=ids)
    return path


@pytest.fixture
def restore_root_logger():
    """Put back the root logger handlers replaced by configure_logging."""
    root = logging.getLogger()
    handlers, level = root.handlers[:], root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)
