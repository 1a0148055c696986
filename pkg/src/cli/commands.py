"""
Command implementations behind the CLI subcommands.

Commands never raise: every failure is logged and returned as an unsuccessful
result object carrying an ErrorCode, which the entry point maps to exit status 1.
"""
import logging
from enum import Enum
from pathlib import Path
from typing import Optional, TypeVar

import numpy as np

from src.core.exceptions import ClareError, ConfigError, ErrorCode, ShapeError
from src.models.data_matrix import DataMatrix
from src.models.evaluation import EvaluationReport, format_compression_ratio
from src.models.grid import Grid
from src.repositories.codec_repository import load_codec
from src.repositories.matrix_repository import load_binary, read_csv_array, write_csv_array
from src.repositories.report_repository import save_report
from src.schemas.run_config import DataFormat, RunConfig
from src.services.evaluation_service import (
    EvaluationService,
    make_folds,
    rank_reports,
)
from src.services.loss_service import press_rows, sq_corr_loss_rows
from src.services.reporting import (
    PlotSpec,
    distribution_plot,
    dotplot_data,
    export_reconstruction_pairs,
    heatmap_data,
    heatmap_plot,
    ratio_plot,
    reconstruction_plot_1d,
    summary_grid_plot,
    summary_plot,
    train_validation_ratio,
    write_dotplot_csv,
    write_heatmap_csv,
    write_ratio_csv,
)
from src.services.result_objects import (
    ApplyResult,
    CompareResult,
    EvaluateResult,
    ServiceResult,
    SubsampleResult,
)

logger = logging.getLogger(__name__)

ResultT = TypeVar("ResultT", bound=ServiceResult)

RECONSTRUCTION_ROWS = 4


class ApplyDirection(str, Enum):
    ENCODE = "encode"
    DECODE = "decode"
    ROUNDTRIP = "roundtrip"


def _failure(result_cls: type[ResultT], exc: BaseException, context: str, prefix: str = "") -> ResultT:
    """Map an exception to an unsuccessful result; prefix is prepended to the message."""
    if isinstance(exc, ClareError):
        code = exc.error_code
        logger.error(f"{context}: {exc}")
    elif isinstance(exc, FileNotFoundError):
        code = ErrorCode.NOT_FOUND
        logger.error(f"{context}: file not found: {exc.filename}")
        return result_cls(success=False, message=f"{prefix}file not found: {exc.filename}", errors=[str(exc)], error_code=code)
    elif isinstance(exc, OSError):
        code = ErrorCode.IO_ERROR
        logger.error(f"{context}: {exc}")
    else:
        code = ErrorCode.INTERNAL_ERROR
        logger.error(f"{context}: unexpected error: {exc}", exc_info=True)
    return result_cls(success=False, message=f"{prefix}{exc}", errors=[str(exc)], error_code=code)


def load_dataset(config: RunConfig) -> DataMatrix:
    """
    Load the configured dataset; without a grid key the data is one-dimensional.

    Raises:
        ConfigError: No data path configured
        OSError, DataFormatError, ShapeError: Unreadable or malformed data
    """
    if not config.data:
        raise ConfigError("no data file configured (set 'data' or pass --data)", key="data")
    grid = config.parsed_grid()
    if config.data_format is DataFormat.CLRE:
        matrix = load_binary(config.data)
        if grid is not None and grid != matrix.grid:
            if grid.length != matrix.t:
                raise ShapeError(f"{config.data}: columns vs grid {grid}", grid.length, matrix.t)
            matrix = matrix.with_values(matrix.values, grid)
        logger.info(f"Loaded {matrix.n} x {matrix.t} matrix from {config.data} (grid {matrix.grid})")
        return matrix

    values, row_ids, _ = read_csv_array(config.data, id_column=config.id_column)
    if grid is None:
        grid = Grid.one_d(values.shape[1])
    elif grid.length != values.shape[1]:
        raise ShapeError(f"{config.data}: columns vs grid {grid}", grid.length, values.shape[1])
    matrix = DataMatrix(values=values, grid=grid, row_ids=tuple(row_ids) if row_ids else ())
    logger.info(f"Loaded {matrix.n} x {matrix.t} matrix from {config.data} (grid {grid})")
    return matrix


def _service(config: RunConfig, service: Optional[EvaluationService]) -> EvaluationService:
    return service or EvaluationService(threads=config.threads or None, verbose=config.verbose)


def write_outputs(report: EvaluationReport, data: DataMatrix, directory: Path, spec: Optional[PlotSpec] = None) -> Path:
    """Persist a report with all of its plots and plot tables."""
    spec = spec or PlotSpec()
    out = save_report(report, directory)
    summary_plot(report, spec, out / "summary_plot.svg")

    write_heatmap_csv(heatmap_data(report), out / "heatmap.csv")
    heatmap_plot(report, spec, out / "heatmap.svg")

    write_dotplot_csv(dotplot_data(report), out / "dotplot.csv")
    distribution_plot(report, spec, out / "distribution_plot.svg")

    write_ratio_csv(train_validation_ratio(report), out / "train_validation_ratio.csv")
    ratio_plot(report, spec, out / "train_validation_ratio.svg")

    codec = report.final_codec
    if codec is not None:
        rows = list(data.row_ids[:RECONSTRUCTION_ROWS])
        if data.grid.is_two_d:
            export_reconstruction_pairs(data, codec, rows, out / "reconstructions")
        else:
            reconstruction_plot_1d(data, codec, rows, out / "reconstruction_1d.svg", spec)
    return out


def describe_outcome(report: EvaluationReport, label: Optional[str] = None) -> str:
    name = label or report.learner_name
    qd = report.qualifying_dimension
    if qd is None or report.compression_ratio is None:
        return f"{name}: criterion not met within grid"
    return (
        f"{name}: qualifying dimension {qd}, "
        f"compression ratio {format_compression_ratio(report.compression_ratio)}"
    )


def cmd_evaluate(config: RunConfig, service: Optional[EvaluationService] = None) -> EvaluateResult:
    """Evaluate the first configured learner and write its output directory."""
    try:
        data = load_dataset(config)
        if len(config.learner_names) > 1:
            logger.warning(f"evaluate uses only the first learner of '{config.learn}'; use compare for several")
        learner = config.build_learner(config.learner_names[0])
        rng = config.rng()
        plan = make_folds(data.n, config.fold_count(data.n), rng)
        report = _service(config, service).run_clare(
            data, learner, config.k_grid(), plan, config.criterion(), rng=rng
        )
        out = write_outputs(report, data, Path(config.out))
    except Exception as exc:
        return _failure(EvaluateResult, exc, "evaluate failed")

    return EvaluateResult(success=True, message=describe_outcome(report), report=report, output_dir=out)


def _unique_labels(names: list[str]) -> list[str]:
    labels = []
    for i, name in enumerate(names):
        labels.append(name if names.count(name) == 1 else f"{name}_{i + 1}")
    return labels


def cmd_compare(config: RunConfig, service: Optional[EvaluationService] = None) -> CompareResult:
    """Evaluate every configured learner on one shared fold plan and rank them."""
    try:
        names = config.learner_names
        if len(names) < 2:
            raise ConfigError("compare needs at least two learners in 'learn' (comma-separated)", key="learn")
        data = load_dataset(config)
        rng = config.rng()
        plan = make_folds(data.n, config.fold_count(data.n), rng)
        runner = _service(config, service)
        out = Path(config.out)

        named: list[tuple[str, EvaluationReport]] = []
        for label, name in zip(_unique_labels(names), names):
            try:
                report = runner.run_clare(
                    data, config.build_learner(name), config.k_grid(), plan, config.criterion(), rng=rng
                )
            except Exception as exc:
                return _failure(CompareResult, exc, "compare failed", prefix=f"learner '{label}': ")
            write_outputs(report, data, out / label)
            named.append((label, report))

        ranking = rank_reports(named)
        lines = [
            f"{position}. {describe_outcome(report, label)}" for position, (label, report) in enumerate(ranking, start=1)
        ]
        (out / "ranking.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    except Exception as exc:
        return _failure(CompareResult, exc, "compare failed")

    return CompareResult(success=True, message="\n".join(lines), ranking=ranking, output_dir=out)


def cmd_subsample(config: RunConfig, service: Optional[EvaluationService] = None) -> SubsampleResult:
    """Run the sample-size experiment (leave-one-out at every size)."""
    try:
        sizes = config.size_list
        if not sizes:
            raise ConfigError("subsample needs 'sizes' (comma-separated, descending)", key="sizes")
        if not config.is_leave_one_out:
            logger.info("subsample always uses leave-one-out folds; ignoring 'folds'")
        data = load_dataset(config)
        learners = config.build_learners()
        reports = _service(config, service).sample_size_experiment(
            data, sizes, learners, config.k_grid(), config.criterion(), config.rng()
        )
        out = Path(config.out)
        cells: list[tuple[int, str, EvaluationReport]] = []
        for report in reports:
            size = report.surface.n
            cells.append((size, report.learner_name, report))
            write_outputs(report, data, out / f"n{size}_{report.learner_name}")
        summary_grid_plot(cells, out / "summary_grid.svg")
    except Exception as exc:
        return _failure(SubsampleResult, exc, "subsample failed")

    message = "\n".join(f"N={n} {describe_outcome(report)}" for n, _, report in cells)
    return SubsampleResult(success=True, message=message, reports=cells, output_dir=out)


def cmd_apply(
    codec_path: str | Path,
    data_path: str | Path,
    direction: ApplyDirection | str,
    out_path: str | Path,
    id_column: Optional[int] = None,
) -> ApplyResult:
    """
    Apply a saved codec to a CSV matrix.

    encode writes the N x K latent matrix, decode reads an N x K latent matrix
    and writes the reconstruction, roundtrip writes the reconstruction and a
    companion <out>_losses.csv with per-row sq_corr and PRESS losses.
    """
    try:
        direction = ApplyDirection(direction)
        codec = load_codec(codec_path)
        values, row_ids, _ = read_csv_array(data_path, id_column=id_column)
        expected = codec.k if direction is ApplyDirection.DECODE else codec.t
        if values.shape[1] != expected:
            raise ShapeError(f"{data_path}: columns for {direction.value}", expected, values.shape[1])

        out = Path(out_path)
        if direction is ApplyDirection.ENCODE:
            result = codec.encode(values)
            header = [f"z{j + 1}" for j in range(codec.k)]
        else:
            result = codec.decode(values) if direction is ApplyDirection.DECODE else codec.reconstruct(values)
            header = [f"x{j + 1}" for j in range(codec.t)]
        if row_ids is not None:
            header = ["id"] + header
        write_csv_array(out, result, header, row_ids=row_ids)

        if direction is ApplyDirection.ROUNDTRIP:
            losses = np.column_stack([sq_corr_loss_rows(values, result), press_rows(values, result)])
            loss_header = (["id"] if row_ids is not None else []) + ["sq_corr_loss", "press"]
            write_csv_array(out.with_name(f"{out.stem}_losses.csv"), losses, loss_header, row_ids=row_ids)
    except Exception as exc:
        return _failure(ApplyResult, exc, "apply failed")

    logger.info(f"{direction.value}: wrote {result.shape[0]} x {result.shape[1]} matrix to {out}")
    return ApplyResult(
        success=True,
        message=f"{direction.value}: wrote {result.shape[0]} x {result.shape[1]} matrix to {out}",
        direction=direction.value,
        output_path=out,
        rows=result.shape[0],
        columns=result.shape[1],
    )
