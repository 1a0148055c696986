"""Persistence of evaluation reports: summary CSV, loss matrices and run metadata."""
import logging
from pathlib import Path
from typing import Optional

import numpy as np

from src.core.constants import FileFormatConstants
from src.core.exceptions import DataFormatError
from src.models.codec import CodecMethod
from src.models.evaluation import EvaluationReport, SummaryRow, format_compression_ratio
from src.repositories.codec_repository import save_codec
from src.repositories.key_value_file import read_key_value_file, write_key_value_file
from src.repositories.matrix_repository import read_csv_array, write_clre, write_csv_array

logger = logging.getLogger(__name__)

SUMMARY_HEADER = ("K", "mean_train", "mean_cv", "min_cv", "max_cv", "q_attain", "q_user")

SUMMARY_FILE = "summary.csv"
CV_FILE = "cv_losses.clre"
TRAIN_FILE = "train_losses.clre"
METADATA_FILE = "metadata.txt"
CODEC_FILE = "codec.clrc"


def summary_matrix(rows: tuple[SummaryRow, ...]) -> np.ndarray:
    return np.array(
        [[r.k, r.mean_train, r.mean_cv, r.min_cv, r.max_cv, r.q_attain, r.q_user] for r in rows],
        dtype=np.float64,
    )


def metadata_items(report: EvaluationReport) -> list[tuple[str, object]]:
    """Flat key=value metadata in a fixed order (no timestamps, so reruns are byte-identical)."""
    criterion = report.criterion
    plan = report.surface.fold_plan
    items: list[tuple[str, object]] = [
        ("learn", report.learner_name),
        ("seed", report.seed),
        ("folds", "loo" if plan.is_leave_one_out else plan.k_folds),
        ("n", report.surface.n),
        ("t", report.t),
        ("latent_dims", ",".join(str(k) for k in report.k_values)),
        ("tolerance_level", repr(criterion.tolerance)),
        ("attainment_rate", repr(criterion.attainment)),
        ("cvqlines", repr(criterion.user_quantile)),
        ("qualifying_dimension", report.qualifying_dimension),
        (
            "compression_ratio",
            None if report.compression_ratio is None else format_compression_ratio(report.compression_ratio),
        ),
    ]
    for key, value in report.learner_config.items():
        if key != "learn":
            items.append((key, value))
    return items


def save_report(report: EvaluationReport, directory: str | Path) -> Path:
    """
    Write summary.csv, cv_losses.clre, train_losses.clre, metadata.txt and,
    when a serializable final codec exists, codec.clrc.

    Returns:
        The output directory
    """
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)

    write_csv_array(out / SUMMARY_FILE, summary_matrix(report.summary), SUMMARY_HEADER)
    kind = FileFormatConstants.GRID_KIND_ONE_D
    write_clre(out / CV_FILE, report.surface.cv, kind)
    write_clre(out / TRAIN_FILE, report.surface.train, kind)
    write_key_value_file(out / METADATA_FILE, metadata_items(report))

    codec = report.final_codec
    if codec is not None and codec.method is not CodecMethod.USER:
        save_codec(codec, out / CODEC_FILE)
    logger.info(f"Saved {report.learner_name} report to {out}")
    return out


def load_summary_csv(path: str | Path) -> tuple[SummaryRow, ...]:
    """
    Read a summary.csv written by save_report.

    Raises:
        DataFormatError: Wrong header or column count
    """
    values, _, header = read_csv_array(path)
    if header is not None and tuple(header) != SUMMARY_HEADER:
        raise DataFormatError(f"{path}: unexpected summary header {header}")
    if values.shape[1] != len(SUMMARY_HEADER):
        raise DataFormatError(f"{path}: expected {len(SUMMARY_HEADER)} columns, found {values.shape[1]}")
    return tuple(
        SummaryRow(
            k=int(row[0]),
            mean_train=float(row[1]),
            mean_cv=float(row[2]),
            min_cv=float(row[3]),
            max_cv=float(row[4]),
            q_attain=float(row[5]),
            q_user=float(row[6]),
        )
        for row in values
    )


def load_metadata(path: str | Path) -> dict[str, str]:
    return {entry.key: entry.value for entry in read_key_value_file(path)}


def metadata_qualifying_dimension(metadata: dict[str, str]) -> Optional[int]:
    value = metadata.get("qualifying_dimension", "")
    return int(value) if value else None
