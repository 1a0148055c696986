"""Tabular data behind the report plots (sorted heatmap, jittered dot plot, train/validation ratio)."""
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Hashable, Optional

import numpy as np

from src.core.rng import RngSpec, RngStream
from src.models.evaluation import EvaluationReport
from src.repositories.matrix_repository import write_csv_array

logger = logging.getLogger(__name__)

JITTER_HALF_WIDTH = 0.4


@dataclass(frozen=True, eq=False)
class HeatmapData:
    """cv losses with every K column sorted ascending; row i sits at quantile level (i+1)/N."""
    sorted_losses: np.ndarray
    quantile_levels: np.ndarray
    k_values: tuple[int, ...]


@dataclass(frozen=True)
class DotplotRow:
    row_id: Hashable
    k: int
    loss: float
    jitter: float


@dataclass(frozen=True)
class RatioSeries:
    """Per-K ratio of total training loss to total validation loss; None where undefined."""
    k_values: tuple[int, ...]
    train_totals: tuple[float, ...]
    cv_totals: tuple[float, ...]
    ratios: tuple[Optional[float], ...]
    notes: tuple[str, ...] = field(default=())


def heatmap_data(report: EvaluationReport) -> HeatmapData:
    cv = report.surface.cv
    n = cv.shape[0]
    return HeatmapData(
        sorted_losses=np.sort(cv, axis=0),
        quantile_levels=np.arange(1, n + 1, dtype=np.float64) / n,
        k_values=report.k_values,
    )


def dotplot_data(report: EvaluationReport) -> list[DotplotRow]:
    """
    One row per (K, observation), K-major, with a horizontal jitter in [-0.4, 0.4]
    drawn from the PlotJitter stream of the run seed.
    """
    cv = report.surface.cv
    generator = RngSpec(report.seed, RngStream.PLOT_JITTER).generator()
    jitter = generator.uniform(-JITTER_HALF_WIDTH, JITTER_HALF_WIDTH, size=cv.shape[::-1])
    ids = report.surface.row_ids
    return [
        DotplotRow(row_id=ids[i], k=k, loss=float(cv[i, j]), jitter=float(jitter[j, i]))
        for j, k in enumerate(report.k_values)
        for i in range(cv.shape[0])
    ]


def train_validation_ratio(report: EvaluationReport) -> RatioSeries:
    train_totals = report.surface.train.sum(axis=0)
    cv_totals = report.surface.cv.sum(axis=0)
    ratios: list[Optional[float]] = []
    notes: list[str] = []
    for k, train_total, cv_total in zip(report.k_values, train_totals, cv_totals):
        if cv_total > 0.0:
            ratios.append(float(train_total / cv_total))
        else:
            ratios.append(None)
            notes.append(f"K={k}: total validation loss is 0, ratio omitted")
    for note in notes:
        logger.info(note)
    return RatioSeries(
        k_values=report.k_values,
        train_totals=tuple(float(v) for v in train_totals),
        cv_totals=tuple(float(v) for v in cv_totals),
        ratios=tuple(ratios),
        notes=tuple(notes),
    )


def write_heatmap_csv(data: HeatmapData, path: str | Path) -> None:
    """Columns: quantile level, then one column per K."""
    matrix = np.column_stack([data.quantile_levels, data.sorted_losses])
    header = ["quantile"] + [f"K{k}" for k in data.k_values]
    write_csv_array(path, matrix, header)


def write_dotplot_csv(rows: list[DotplotRow], path: str | Path) -> None:
    values = np.array([[r.k, r.loss, r.jitter] for r in rows], dtype=np.float64)
    write_csv_array(path, values, ("row_id", "K", "cv_loss", "jitter"), row_ids=[r.row_id for r in rows])


def write_ratio_csv(series: RatioSeries, path: str | Path) -> None:
    """Only K values with a defined ratio are written."""
    values = np.array(
        [
            [k, train_total, cv_total, ratio]
            for k, train_total, cv_total, ratio in zip(
                series.k_values, series.train_totals, series.cv_totals, series.ratios
            )
            if ratio is not None
        ],
        dtype=np.float64,
    ).reshape(-1, 4)
    write_csv_array(path, values, ("K", "train_total", "cv_total", "ratio"))
