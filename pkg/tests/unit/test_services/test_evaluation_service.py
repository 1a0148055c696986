"""
Unit tests for the cross-validation driver.

Tests cover:
- Fold construction (sizes, determinism, leave-one-out)
- Empirical quantile, qualifying dimension and compression ratio
- run_clare on noiseless rank-5 data (qualifying dimension 5)
- Hold-out integrity, fold reuse and scheduling independence
- Grid clamping, learner failures and the final refit
- The sample-size experiment
"""
import logging
import threading

import numpy as np
import pytest

from src.core.exceptions import DomainError, LearnerFitError
from src.core.rng import RngSpec, RngStream
from src.models.data_matrix import DataMatrix
from src.models.evaluation import Criterion, KGrid, SummaryRow, format_compression_ratio
from src.models.grid import Grid
from src.services.evaluation_service import (
    EvaluationService,
    compression_ratio,
    empirical_quantile,
    find_qualifying_dimension,
    make_folds,
    rank_reports,
)
from src.services.learners import DwtLearner, PcaLearner, UserLearner
from src.services.learners.base import Learner
from src.services.loss_service import sq_corr_loss_rows


class SpyLearner(Learner):
    """PCA learner that records which rows every fit was trained on."""

    name = "spy"

    def __init__(self):
        self.inner = PcaLearner()
        self.calls: list[tuple[int, frozenset]] = []
        self._lock = threading.Lock()

    def max_dimension(self, n_train, t, grid):
        return self.inner.max_dimension(n_train, t, grid)

    def fit(self, train, k, rng):
        with self._lock:
            self.calls.append((k, frozenset(train.row_ids)))
        return self.inner.fit(train, k, rng)


def summary_row(k: int, q_attain: float) -> SummaryRow:
    return SummaryRow(k=k, mean_train=0.0, mean_cv=0.0, min_cv=0.0, max_cv=0.0, q_attain=q_attain, q_user=0.0)


def metric_total(reader, name: str) -> float:
    data = reader.get_metrics_data()
    total = 0.0
    for resource in data.resource_metrics:
        for scope in resource.scope_metrics:
            for metric in scope.metrics:
                if metric.name == name:
                    total += sum(point.value for point in metric.data.data_points)
    return total


class TestMakeFolds:

    @pytest.mark.unit
    def test_sizes_differ_by_at_most_one(self, rng):
        plan = make_folds(10, 3, rng)

        assert plan.fold_sizes() == [4, 3, 3]
        assert sorted(np.concatenate([plan.validation_indices(f) for f in range(3)]).tolist()) == list(range(10))

    @pytest.mark.unit
    def test_deterministic_given_seed(self):
        first = make_folds(50, 5, RngSpec(7, RngStream.FOLD_SHUFFLE))
        second = make_folds(50, 5, RngSpec(7, RngStream.FOLD_SHUFFLE))
        other = make_folds(50, 5, RngSpec(8, RngStream.FOLD_SHUFFLE))

        np.testing.assert_array_equal(first.assignment, second.assignment)
        assert not np.array_equal(first.assignment, other.assignment)

    @pytest.mark.unit
    def test_stream_is_forced_to_fold_shuffle(self):
        a = make_folds(20, 4, RngSpec(3, RngStream.FOLD_SHUFFLE))
        b = make_folds(20, 4, RngSpec(3, RngStream.AE_INIT))

        np.testing.assert_array_equal(a.assignment, b.assignment)

    @pytest.mark.unit
    def test_leave_one_out_is_identity(self, rng):
        plan = make_folds(6, 6, rng)

        assert plan.is_leave_one_out
        np.testing.assert_array_equal(plan.assignment, np.arange(6))

    @pytest.mark.unit
    @pytest.mark.parametrize("k_folds", [1, 11])
    def test_out_of_range(self, rng, k_folds):
        with pytest.raises(DomainError):
            make_folds(10, k_folds, rng)


class TestQuantileAndCriterion:

    @pytest.mark.unit
    def test_order_statistic(self):
        values = np.arange(1.0, 101.0)

        assert empirical_quantile(values, 0.95) == 95.0
        assert empirical_quantile(values, 0.9) == 90.0
        assert empirical_quantile(values, 1.0) == 100.0
        assert empirical_quantile(values, 0.001) == 1.0

    @pytest.mark.unit
    def test_unsorted_input(self):
        assert empirical_quantile([0.3, 0.1, 0.2, 0.4], 0.5) == 0.2

    @pytest.mark.unit
    def test_invalid_level(self):
        with pytest.raises(DomainError):
            empirical_quantile([1.0, 2.0], 0.0)
        with pytest.raises(DomainError):
            empirical_quantile([], 0.5)

    @pytest.mark.unit
    def test_qualifying_dimension_is_first_strictly_below(self):
        rows = [summary_row(1, 0.4), summary_row(3, 0.05), summary_row(5, 0.049), summary_row(7, 0.01)]

        assert find_qualifying_dimension(rows, 0.05) == 5

    @pytest.mark.unit
    @pytest.mark.parametrize("seed", range(100))
    def test_qualifying_dimension_matches_brute_force_scan(self, seed):
        generator = np.random.default_rng(seed)
        n, width = int(generator.integers(3, 30)), int(generator.integers(1, 8))
        losses = generator.uniform(0.0, 0.12, size=(n, width))
        attainment = float(generator.choice([0.5, 0.9, 0.95, 1.0]))
        rows = [summary_row(k, empirical_quantile(losses[:, j], attainment)) for j, k in enumerate(range(1, width + 1))]

        expected = None
        for j in range(width):
            ordered = sorted(losses[:, j])
            rank = 1
            while rank < n and rank < attainment * n - 1e-9:
                rank += 1
            if ordered[rank - 1] < 0.05:
                expected = j + 1
                break

        assert find_qualifying_dimension(rows, 0.05) == expected

    @pytest.mark.unit
    def test_no_qualifying_dimension(self):
        assert find_qualifying_dimension([summary_row(1, 0.5), summary_row(2, 0.2)], 0.05) is None

    @pytest.mark.unit
    @pytest.mark.parametrize(
        "t, qd, expected",
        [(128, 5, 26), (100, 8, 13), (10, 4, 3), (93, 61, 2), (7, 7, 1), (14400, 41, 351), (556206, 7801, 71), (784, 101, 8), (784, 201, 4)],
    )
    def test_compression_ratio_rounds_half_up(self, t, qd, expected):
        assert compression_ratio(t, qd) == expected

    @pytest.mark.unit
    def test_compression_ratio_format(self):
        assert format_compression_ratio(26) == "26:1"


class TestRunClare:
    """Test the evaluation driver end to end on in-memory data."""

    @pytest.mark.unit
    def test_rank5_pca_qualifies_at_five(self, evaluation_service, rank5_matrix, k_grid, criterion, rng):
        # Arrange
        plan = make_folds(rank5_matrix.n, 5, rng)

        # Act
        report = evaluation_service.run_clare(rank5_matrix, PcaLearner(), k_grid, plan, criterion, rng=rng)

        # Assert
        assert report.k_values == tuple(range(1, 9))
        assert report.surface.cv.shape == (60, 8)
        assert not np.any(np.isnan(report.surface.cv))
        assert report.qualifying_dimension == 5
        assert report.compression_ratio == 6  # round(32 / 5)
        assert report.criterion_met
        assert report.summary[4].max_cv < 1e-12
        assert report.final_codec is not None and report.final_codec.k == 5

    @pytest.mark.unit
    def test_qualifying_dimension_is_minimal(self, evaluation_service, rank5_matrix, k_grid, criterion, rng):
        plan = make_folds(rank5_matrix.n, 5, rng)

        report = evaluation_service.run_clare(rank5_matrix, PcaLearner(), k_grid, plan, criterion, rng=rng)

        qd = report.qualifying_dimension
        for row in report.summary:
            if row.k < qd:
                assert row.q_attain >= criterion.tolerance
        for j, k in enumerate(report.k_values):
            assert report.summary[j].q_attain == empirical_quantile(report.surface.cv[:, j], criterion.attainment)

    @pytest.mark.unit
    def test_train_losses_average_over_training_folds(self, evaluation_service, small_matrix, criterion, rng):
        plan = make_folds(small_matrix.n, 3, rng)

        report = evaluation_service.run_clare(
            small_matrix, PcaLearner(), KGrid(start=2, stop=2), plan, criterion, rng=rng, refit=False
        )

        expected = np.zeros(small_matrix.n)
        for fold in range(3):
            training = plan.training_indices(fold)
            codec = PcaLearner().fit(small_matrix.take(training), 2, rng)
            x = small_matrix.values[training]
            expected[training] += sq_corr_loss_rows(x, codec.reconstruct(x)) / 2.0
        np.testing.assert_allclose(report.surface.train[:, 0], expected, rtol=1e-12)
        assert report.final_codec is None

    @pytest.mark.unit
    def test_leave_one_out_matches_reference_loop(self, evaluation_service, criterion, rng):
        values = np.random.default_rng(21).normal(size=(6, 5))
        data = DataMatrix(values=values, grid=Grid.one_d(5))

        report = evaluation_service.run_clare(
            data, PcaLearner(), KGrid(start=1, stop=2), make_folds(6, 6, rng), criterion, rng=rng, refit=False
        )

        reference = np.zeros((6, 2))
        for i in range(6):
            keep = [r for r in range(6) if r != i]
            for j, k in enumerate((1, 2)):
                codec = PcaLearner().fit(data.take(keep), k, rng)
                reference[i, j] = sq_corr_loss_rows(values[i : i + 1], codec.reconstruct(values[i : i + 1]))[0]
        np.testing.assert_allclose(report.surface.cv, reference, atol=1e-12)

    @pytest.mark.unit
    def test_hold_out_integrity_and_fold_reuse(self, evaluation_service, small_matrix, criterion, rng):
        spy = SpyLearner()
        plan = make_folds(small_matrix.n, 4, rng)

        report = evaluation_service.run_clare(
            small_matrix, spy, KGrid(start=1, stop=3), plan, criterion, rng=rng, refit=False
        )

        assert report.surface.fold_plan is plan
        assert len(spy.calls) == 3 * 4
        all_ids = frozenset(small_matrix.row_ids)
        expected_sets = {
            frozenset(small_matrix.row_ids[i] for i in plan.training_indices(fold)) for fold in range(4)
        }
        for k in (1, 2, 3):
            trained = {ids for call_k, ids in spy.calls if call_k == k}
            assert trained == expected_sets
        for ids in expected_sets:
            assert ids != all_ids

    @pytest.mark.unit
    def test_scheduling_independence(self, metrics_service, rank5_matrix, k_grid, criterion, rng):
        plan = make_folds(rank5_matrix.n, 5, rng)

        sequential = EvaluationService(threads=1, metrics=metrics_service).run_clare(
            rank5_matrix, DwtLearner(), k_grid, plan, criterion, rng=rng
        )
        concurrent = EvaluationService(threads=4, metrics=metrics_service).run_clare(
            rank5_matrix, DwtLearner(), k_grid, plan, criterion, rng=rng
        )

        assert sequential.surface.cv.tobytes() == concurrent.surface.cv.tobytes()
        assert sequential.surface.train.tobytes() == concurrent.surface.train.tobytes()
        assert sequential.summary == concurrent.summary

    @pytest.mark.unit
    def test_grid_clamped_with_warning(self, evaluation_service, rank5_matrix, criterion, rng, caplog):
        plan = make_folds(rank5_matrix.n, 5, rng)

        with caplog.at_level(logging.WARNING, logger="src.services.evaluation_service"):
            report = evaluation_service.run_clare(
                rank5_matrix, PcaLearner(), KGrid(start=1, stop=400, step=20), plan, criterion, rng=rng
            )

        # 48 training rows on 32 grid points allow at most 32 components
        assert report.k_values == (1, 21)
        assert "clamping" in caplog.text

    @pytest.mark.unit
    def test_infeasible_grid(self, evaluation_service, small_matrix, criterion, rng):
        plan = make_folds(small_matrix.n, 3, rng)

        with pytest.raises(DomainError, match="infeasible"):
            evaluation_service.run_clare(small_matrix, PcaLearner(), KGrid(start=20, stop=30), plan, criterion)

    @pytest.mark.unit
    def test_learner_failure_carries_task(self, evaluation_service, small_matrix, criterion, rng):
        def failing(train, k):
            if k == 3:
                raise ValueError("singular system")
            return (lambda x: x[:k]), (lambda z: np.resize(z, train.t))

        plan = make_folds(small_matrix.n, 3, rng)

        with pytest.raises(LearnerFitError) as exc_info:
            evaluation_service.run_clare(
                small_matrix, UserLearner(failing, name="fragile"), KGrid(start=1, stop=4), plan, criterion
            )

        assert exc_info.value.k == 3
        assert exc_info.value.method == "fragile"
        assert "singular system" in str(exc_info.value)

    @pytest.mark.unit
    def test_fold_plan_size_mismatch(self, evaluation_service, small_matrix, criterion, rng):
        with pytest.raises(DomainError):
            evaluation_service.run_clare(small_matrix, PcaLearner(), KGrid(start=1, stop=2), make_folds(20, 4, rng), criterion)

    @pytest.mark.unit
    def test_not_qualified(self, evaluation_service, small_matrix, rng):
        # pure noise never reaches a tolerance of 1%
        criterion = Criterion(tolerance=0.01, attainment=0.95)

        report = evaluation_service.run_clare(
            small_matrix, PcaLearner(), KGrid(start=1, stop=3), make_folds(12, 3, rng), criterion
        )

        assert report.qualifying_dimension is None
        assert report.compression_ratio is None
        assert report.final_codec is None
        assert not report.criterion_met

    @pytest.mark.unit
    def test_metrics_recorded(self, evaluation_service, metrics_reader, small_matrix, criterion, rng):
        evaluation_service.run_clare(
            small_matrix, PcaLearner(), KGrid(start=1, stop=2), make_folds(12, 3, rng), criterion, refit=False
        )

        assert metric_total(metrics_reader, "clare_fits_total") == 6
        assert metric_total(metrics_reader, "clare_runs_total") == 1


class TestRankReports:

    @pytest.mark.unit
    def test_smallest_qualifying_dimension_first(self, evaluation_service, rank5_matrix, small_matrix, criterion, rng):
        good = evaluation_service.run_clare(
            rank5_matrix, PcaLearner(), KGrid(start=1, stop=8), make_folds(60, 5, rng), criterion
        )
        unqualified = evaluation_service.run_clare(
            small_matrix, PcaLearner(), KGrid(start=1, stop=2), make_folds(12, 3, rng), criterion
        )

        ranking = rank_reports([("noise", unqualified), ("pca", good)])

        assert [label for label, _ in ranking] == ["pca", "noise"]


class TestSampleSizeExperiment:

    @pytest.mark.unit
    def test_reports_per_size_and_learner(self, evaluation_service, rank5_matrix, criterion, rng):
        learners = [PcaLearner(), DwtLearner()]

        reports = evaluation_service.sample_size_experiment(
            rank5_matrix, [30, 15], learners, KGrid(start=1, stop=6), criterion, rng
        )

        assert [(r.surface.n, r.learner_name) for r in reports] == [(30, "pca"), (30, "dwt"), (15, "pca"), (15, "dwt")]
        assert all(r.surface.fold_plan.is_leave_one_out for r in reports)
        assert set(reports[2].surface.row_ids) <= set(rank5_matrix.row_ids)

    @pytest.mark.unit
    def test_full_size_matches_leave_one_out_run(self, evaluation_service, small_matrix, criterion, rng):
        grid = KGrid(start=1, stop=4)

        [report] = evaluation_service.sample_size_experiment(small_matrix, [12], [PcaLearner()], grid, criterion, rng)
        direct = evaluation_service.run_clare(small_matrix, PcaLearner(), grid, make_folds(12, 12, rng), criterion, rng=rng)

        np.testing.assert_array_equal(report.surface.cv, direct.surface.cv)

    @pytest.mark.unit
    def test_seeds_change_subsets(self, evaluation_service, rank5_matrix, criterion):
        grid = KGrid(start=1, stop=2)

        first = evaluation_service.sample_size_experiment(
            rank5_matrix, [10], [PcaLearner()], grid, criterion, RngSpec(1, RngStream.FOLD_SHUFFLE)
        )[0]
        second = evaluation_service.sample_size_experiment(
            rank5_matrix, [10], [PcaLearner()], grid, criterion, RngSpec(2, RngStream.FOLD_SHUFFLE)
        )[0]

        assert first.surface.row_ids != second.surface.row_ids

    @pytest.mark.unit
    @pytest.mark.parametrize("sizes", [[15, 30], [20, 20], []])
    def test_sizes_must_descend(self, evaluation_service, rank5_matrix, criterion, rng, sizes):
        with pytest.raises(DomainError):
            evaluation_service.sample_size_experiment(
                rank5_matrix, sizes, [PcaLearner()], KGrid(start=1, stop=2), criterion, rng
            )
