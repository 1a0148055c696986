"""
Cross-validated evaluation of latent feature representations.

For every candidate latent dimension K and every fold, a codec is fitted on the
training rows and each held-out row is scored by its reconstruction loss. The
per-K distribution of held-out losses decides the qualifying dimension: the
smallest K whose attainment-rate quantile is below the tolerance.
"""
import logging
import math
import time
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from joblib import Parallel, delayed

from src.core.config import settings
from src.core.exceptions import ClareError, DomainError, LearnerFitError
from src.core.rng import RngSpec, RngStream
from src.models.codec import Codec
from src.models.data_matrix import DataMatrix
from src.models.evaluation import (
    Criterion,
    EvaluationReport,
    FoldPlan,
    KGrid,
    LossSurface,
    SummaryRow,
    format_compression_ratio,
)
from src.services.learners.base import Learner
from src.services.loss_service import sq_corr_loss_rows
from src.services.metrics_service import MetricsService, get_metrics_service
from src.services.sampling_service import subsample

logger = logging.getLogger(__name__)


def make_folds(n: int, k_folds: int, rng: RngSpec) -> FoldPlan:
    """
    Shuffle rows with the FoldShuffle stream and deal them into k_folds contiguous blocks.

    Block sizes differ by at most one, larger blocks first. Leave-one-out
    (k_folds == n) assigns row i to fold i without shuffling.

    Raises:
        DomainError: k_folds outside 2..n
    """
    if not 2 <= k_folds <= n:
        raise DomainError(f"folds must be in 2..{n}, got {k_folds}")
    if k_folds == n:
        return FoldPlan(assignment=np.arange(n), k_folds=k_folds, seed=rng.seed)

    permutation = rng.with_stream(RngStream.FOLD_SHUFFLE).generator().permutation(n)
    base, extra = divmod(n, k_folds)
    sizes = [base + 1 if fold < extra else base for fold in range(k_folds)]
    labels = np.repeat(np.arange(k_folds), sizes)
    assignment = np.empty(n, dtype=np.intp)
    assignment[permutation] = labels
    return FoldPlan(assignment=assignment, k_folds=k_folds, seed=rng.seed)


def empirical_quantile(values: Sequence[float] | np.ndarray, q: float) -> float:
    """
    The ceil(q * N)-th order statistic (1-based) of values.

    Raises:
        DomainError: Empty input or q outside (0, 1]
    """
    arr = np.sort(np.asarray(values, dtype=np.float64).ravel())
    if arr.size == 0:
        raise DomainError("quantile of an empty sample")
    if not 0.0 < q <= 1.0:
        raise DomainError(f"quantile level must be in (0, 1], got {q}")
    # round away float noise such as 0.95 * 100 = 95.00000000000001
    rank = max(1, math.ceil(round(q * arr.size, 9)))
    return float(arr[rank - 1])


def summarize_surface(surface: LossSurface, criterion: Criterion) -> tuple[SummaryRow, ...]:
    """One summary row per grid K."""
    rows = []
    for j, k in enumerate(surface.k_values):
        cv = surface.cv[:, j]
        rows.append(
            SummaryRow(
                k=k,
                mean_train=float(surface.train[:, j].mean()),
                mean_cv=float(cv.mean()),
                min_cv=float(cv.min()),
                max_cv=float(cv.max()),
                q_attain=empirical_quantile(cv, criterion.attainment),
                q_user=empirical_quantile(cv, criterion.user_quantile),
            )
        )
    return tuple(rows)


def find_qualifying_dimension(rows: Sequence[SummaryRow], tolerance: float) -> Optional[int]:
    """Smallest K whose attainment quantile is strictly below tolerance, or None."""
    for row in rows:
        if row.q_attain < tolerance:
            return row.k
    return None


def compression_ratio(t: int, qd: int) -> int:
    """round(T / qd), halves rounded up."""
    if qd < 1:
        raise DomainError(f"qualifying dimension must be >= 1, got {qd}")
    return math.floor(t / qd + 0.5)


def rank_reports(named_reports: Sequence[tuple[str, EvaluationReport]]) -> list[tuple[str, EvaluationReport]]:
    """Order by qualifying dimension, smallest first; missing qd last; ties keep listing order."""
    return sorted(
        named_reports,
        key=lambda item: (item[1].qualifying_dimension is None, item[1].qualifying_dimension or 0),
    )


@dataclass(frozen=True)
class _TaskResult:
    column: int
    fold: int
    validation: np.ndarray
    cv_losses: np.ndarray
    training: np.ndarray
    train_losses: np.ndarray


class EvaluationService:
    """Runs the cross-validated evaluation of one learner."""

    def __init__(
        self,
        threads: Optional[int] = None,
        verbose: bool = False,
        metrics: Optional[MetricsService] = None,
    ):
        self.threads = threads if threads and threads > 0 else settings.resolved_threads
        self.verbose = verbose
        self.metrics = metrics or get_metrics_service()

    def _log_progress(self, message: str) -> None:
        logger.log(logging.INFO if self.verbose else logging.DEBUG, message)

    def _feasible_grid(self, data: DataMatrix, learner: Learner, k_grid: KGrid, fold_plan: FoldPlan) -> KGrid:
        smallest_train = data.n - max(fold_plan.fold_sizes())
        maximum = learner.max_dimension(smallest_train, data.t, data.grid)
        clamped = k_grid.clamp(maximum)
        if clamped.stop != k_grid.stop:
            logger.warning(
                f"{learner.name}: latent_dim_to={k_grid.stop} exceeds the maximum latent dimension "
                f"{maximum} for {smallest_train} training rows; clamping to {clamped.stop}"
            )
        return clamped

    def _run_task(
        self,
        data: DataMatrix,
        learner: Learner,
        fold_plan: FoldPlan,
        column: int,
        k: int,
        fold: int,
        rng: RngSpec,
    ) -> _TaskResult:
        training = fold_plan.training_indices(fold)
        validation = fold_plan.validation_indices(fold)
        start = time.perf_counter()
        try:
            with self.metrics.track_fit(learner.name):
                codec = learner.fit(data.take(training), k, rng.derive(k, fold))
                x_val = data.values[validation]
                x_train = data.values[training]
                cv_losses = sq_corr_loss_rows(x_val, codec.reconstruct(x_val))
                train_losses = sq_corr_loss_rows(x_train, codec.reconstruct(x_train))
        except Exception as exc:
            raise LearnerFitError(learner.name, k, fold, exc) from exc
        self._log_progress(
            f"{learner.name} K={k} fold={fold + 1}/{fold_plan.k_folds}: "
            f"{time.perf_counter() - start:.3f}s"
        )
        return _TaskResult(column, fold, validation, cv_losses, training, train_losses)

    def run_clare(
        self,
        data: DataMatrix,
        learner: Learner,
        k_grid: KGrid,
        fold_plan: FoldPlan,
        criterion: Criterion,
        rng: Optional[RngSpec] = None,
        refit: bool = True,
    ) -> EvaluationReport:
        """
        Cross-validate learner over the K grid with a fixed fold plan.

        Args:
            data: Dataset
            learner: Learner to evaluate
            k_grid: Candidate latent dimensions (clamped to the learner's maximum with a warning)
            fold_plan: Folds shared by every K
            criterion: Tolerance, attainment rate and plotted user quantile
            rng: Base seed for stochastic learners; tasks derive keys (K, fold)
            refit: Fit the final codec on the full data at the qualifying dimension

        Returns:
            EvaluationReport with the loss surface, summary and (when qualified) the final codec

        Raises:
            LearnerFitError: A learner failed; carries K and fold
            DomainError: Infeasible grid or fold plan of the wrong size
        """
        if fold_plan.n != data.n:
            raise DomainError(f"fold plan covers {fold_plan.n} rows but the data has {data.n}")
        rng = rng or RngSpec(fold_plan.seed, RngStream.AE_INIT)
        grid = self._feasible_grid(data, learner, k_grid, fold_plan)
        k_values = tuple(grid.values())
        run_start = time.perf_counter()
        logger.info(
            f"Evaluating {learner.name} on {data.n} x {data.t} data: K in {k_values[0]}..{k_values[-1]} "
            f"({len(k_values)} values), {fold_plan.k_folds} folds, {self.threads} thread(s)"
        )

        tasks = [(column, k, fold) for column, k in enumerate(k_values) for fold in range(fold_plan.k_folds)]
        try:
            results = Parallel(n_jobs=self.threads, prefer="threads")(
                delayed(self._run_task)(data, learner, fold_plan, column, k, fold, rng)
                for column, k, fold in tasks
            )
        except ClareError:
            self.metrics.increment_runs(learner.name, "error")
            raise

        n, width = data.n, len(k_values)
        cv = np.full((n, width), np.nan)
        train_sum = np.zeros((n, width))
        train_count = np.zeros((n, width))
        for result in results:
            cv[result.validation, result.column] = result.cv_losses
            train_sum[result.training, result.column] += result.train_losses
            train_count[result.training, result.column] += 1.0
        train = train_sum / train_count
        for arr in (cv, train):
            arr.setflags(write=False)

        surface = LossSurface(cv=cv, train=train, k_values=k_values, fold_plan=fold_plan, row_ids=data.row_ids)
        summary = summarize_surface(surface, criterion)
        qd = find_qualifying_dimension(summary, criterion.tolerance)

        final_codec: Optional[Codec] = None
        ratio: Optional[int] = None
        if qd is not None:
            ratio = compression_ratio(data.t, qd)
            if refit:
                try:
                    final_codec = learner.fit(data, qd, rng.derive(qd))
                except Exception as exc:
                    self.metrics.increment_runs(learner.name, "error")
                    raise LearnerFitError(learner.name, qd, None, exc) from exc
            logger.info(f"{learner.name}: qualifying dimension {qd}, compression ratio {format_compression_ratio(ratio)}")
        else:
            logger.info(f"{learner.name}: criterion not met within grid")

        outcome = "qualified" if qd is not None else "not_qualified"
        self.metrics.increment_runs(learner.name, outcome)
        self.metrics.record_run_duration(time.perf_counter() - run_start, learner.name, outcome)

        return EvaluationReport(
            surface=surface,
            summary=summary,
            criterion=criterion,
            t=data.t,
            learner_name=learner.name,
            learner_config=learner.describe(),
            qualifying_dimension=qd,
            compression_ratio=ratio,
            final_codec=final_codec,
        )

    def sample_size_experiment(
        self,
        data: DataMatrix,
        sizes: Sequence[int],
        learners: Sequence[Learner],
        k_grid: KGrid,
        criterion: Criterion,
        rng: RngSpec,
    ) -> list[EvaluationReport]:
        """
        Re-run the evaluation on successively smaller random subsets with leave-one-out folds.

        Returns one report per (size, learner), sizes outermost.

        Raises:
            DomainError: sizes not strictly descending or a size outside 2..N
        """
        if not sizes:
            raise DomainError("sizes must not be empty")
        if any(b >= a for a, b in zip(sizes, sizes[1:])):
            raise DomainError(f"sizes must be strictly descending, got {list(sizes)}")

        reports: list[EvaluationReport] = []
        for size in sizes:
            subset = subsample(data, size, rng)
            plan = make_folds(size, size, rng)
            logger.info(f"Sample-size experiment: N={size} (leave-one-out)")
            for learner in learners:
                reports.append(self.run_clare(subset, learner, k_grid, plan, criterion, rng=rng))
        return reports


def run_clare(
    data: DataMatrix,
    learner: Learner,
    k_grid: KGrid,
    fold_plan: FoldPlan,
    criterion: Criterion,
    rng: Optional[RngSpec] = None,
    threads: Optional[int] = None,
) -> EvaluationReport:
    """Convenience wrapper around EvaluationService.run_clare."""
    return EvaluationService(threads=threads).run_clare(data, learner, k_grid, fold_plan, criterion, rng=rng)


def sample_size_experiment(
    data: DataMatrix,
    sizes: Sequence[int],
    learners: Sequence[Learner],
    k_grid: KGrid,
    criterion: Criterion,
    rng: RngSpec,
    threads: Optional[int] = None,
) -> list[EvaluationReport]:
    return EvaluationService(threads=threads).sample_size_experiment(data, sizes, learners, k_grid, criterion, rng)
