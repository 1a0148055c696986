"""Evaluation reports shared by the reporting tests."""
import pytest

from src.core.rng import RngSpec, RngStream
from src.models.evaluation import EvaluationReport, KGrid
from src.services.evaluation_service import make_folds
from src.services.learners import PcaLearner


@pytest.fixture
def pca_report(evaluation_service, rank5_matrix, criterion) -> EvaluationReport:
    """PCA on the rank-5 curves, K 1..7, four folds (qualifies at 5)."""
    rng = RngSpec(1, RngStream.FOLD_SHUFFLE)
    plan = make_folds(rank5_matrix.n, 4, rng)
    return evaluation_service.run_clare(rank5_matrix, PcaLearner(), KGrid(start=1, stop=7), plan, criterion, rng=rng)
