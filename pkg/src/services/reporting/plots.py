"""
Static SVG plots of an evaluation report.

Every element that tests or downstream tools may look for carries a class:
series lines are "series <role>", the tolerance guide is "eps-guide", the
qualifying-dimension marker is "qd-marker", heatmap cells are "cell", dot-plot
points are "dot", 1D overlays are "original" and "reconstruction".
"""
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Hashable, Optional, Sequence

import numpy as np

from src.core.constants import PlotColors
from src.core.exceptions import DomainError, ShapeError
from src.models.codec import Codec
from src.models.data_matrix import DataMatrix
from src.models.evaluation import EvaluationReport
from src.repositories.matrix_repository import write_csv_array
from src.services.reporting.plot_data import dotplot_data, heatmap_data, train_validation_ratio
from src.services.reporting.svg_canvas import Axes, SvgCanvas, integer_ticks, linear_ticks

logger = logging.getLogger(__name__)

SERIES_ROLES = ("mean_cv", "mean_train", "min_cv", "max_cv", "q_user", "q_attain")

DEFAULT_COLORS = {
    "mean_cv": PlotColors.MEAN_CV,
    "mean_train": PlotColors.MEAN_TRAIN,
    "min_cv": PlotColors.MIN_CV,
    "max_cv": PlotColors.MAX_CV,
    "q_user": PlotColors.USER_QUANTILE,
    "q_attain": PlotColors.ATTAINMENT_QUANTILE,
    "eps": PlotColors.EPSILON_GUIDE,
    "qd": PlotColors.QD_MARKER,
}

SERIES_LABELS = {
    "mean_cv": "mean (validation)",
    "mean_train": "mean (training)",
    "min_cv": "minimum",
    "max_cv": "maximum",
    "q_user": "user quantile",
    "q_attain": "attainment quantile",
}

# Categorical colours for dot-plot K columns
_K_PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")


@dataclass(frozen=True)
class PlotSpec:
    width: int = 720
    height: int = 480
    colors: dict[str, str] = field(default_factory=lambda: dict(DEFAULT_COLORS))
    x_label: str = "latent dimension K"
    y_label: str = "information loss (1 - rho^2)"
    margin_left: int = 70
    margin_right: int = 170
    margin_top: int = 40
    margin_bottom: int = 55

    def color(self, role: str) -> str:
        return self.colors.get(role, DEFAULT_COLORS.get(role, PlotColors.AXIS))


def _series(report: EvaluationReport) -> dict[str, list[float]]:
    return {role: [getattr(row, role) for row in report.summary] for role in SERIES_ROLES}


def _loss_axes(left: float, top: float, width: float, height: float, report: EvaluationReport) -> Axes:
    ks = report.k_values
    values = [v for series in _series(report).values() for v in series]
    y_max = max(max(values, default=0.0), report.criterion.tolerance)
    return Axes(left, top, width, height, ks[0], ks[-1], 0.0, y_max * 1.05 if y_max > 0 else 1.0)


def _draw_summary(canvas: SvgCanvas, axes: Axes, report: EvaluationReport, spec: PlotSpec, ticks: bool = True) -> None:
    qd = report.qualifying_dimension
    tolerance = report.criterion.tolerance
    if ticks:
        y_ticks = sorted(set(linear_ticks(axes.y_min, axes.y_max, 4)) | {tolerance})
        axes.draw_frame(
            canvas,
            integer_ticks(list(report.k_values)),
            y_ticks,
            spec.x_label,
            spec.y_label,
            highlight_x=(qd,) if qd is not None else (),
            highlight_y=(tolerance,) if qd is not None else (),
            tick_format="{:.3g}",
        )
    else:
        canvas.line(axes.left, axes.bottom, axes.right, axes.bottom, css_class="axis")
        canvas.line(axes.left, axes.top, axes.left, axes.bottom, css_class="axis")

    canvas.line(
        axes.left, axes.y(tolerance), axes.right, axes.y(tolerance),
        stroke=spec.color("eps"), dash="6,4", css_class="eps-guide",
    )
    for role, values in _series(report).items():
        points = [(axes.x(k), axes.y(v)) for k, v in zip(report.k_values, values)]
        canvas.polyline(points, stroke=spec.color(role), width=2.0, css_class=f"series {role}")
    if qd is not None:
        canvas.line(
            axes.x(qd), axes.top, axes.x(qd), axes.bottom,
            stroke=spec.color("qd"), dash="2,3", css_class="qd-marker",
        )


def _legend(canvas: SvgCanvas, x: float, y: float, spec: PlotSpec) -> None:
    canvas.group_start("legend")
    for i, role in enumerate(SERIES_ROLES):
        row_y = y + i * 18
        canvas.line(x, row_y, x + 22, row_y, stroke=spec.color(role), width=3.0)
        canvas.text(x + 28, row_y + 4, SERIES_LABELS[role], size=11, anchor="start")
    canvas.group_end()


def _plot_area(spec: PlotSpec) -> tuple[float, float, float, float]:
    return (
        spec.margin_left,
        spec.margin_top,
        spec.width - spec.margin_left - spec.margin_right,
        spec.height - spec.margin_top - spec.margin_bottom,
    )


def _title(report: EvaluationReport) -> str:
    qd = report.qualifying_dimension
    if qd is None:
        return f"{report.learner_name}: criterion not met within grid"
    return f"{report.learner_name}: qualifying dimension {qd} ({report.compression_ratio}:1)"


def summary_plot(report: EvaluationReport, spec: PlotSpec, path: str | Path) -> Path:
    """Six summary series over K, the tolerance guide and, when present, the qd marker."""
    if not report.summary:
        raise DomainError("summary plot needs at least one grid point")
    canvas = SvgCanvas(spec.width, spec.height)
    axes = _loss_axes(*_plot_area(spec), report)
    canvas.text(spec.width / 2, 22, _title(report), size=14)
    _draw_summary(canvas, axes, report, spec)
    _legend(canvas, axes.right + 20, axes.top + 10, spec)
    return canvas.save(path)


def _heat_color(value: float, low: float, high: float) -> str:
    """Linear blend from pale yellow (low loss) to dark purple (high loss)."""
    start = np.array([253, 231, 37], dtype=np.float64)
    end = np.array([68, 1, 84], dtype=np.float64)
    share = 0.0 if high <= low else float(np.clip((value - low) / (high - low), 0.0, 1.0))
    r, g, b = np.rint(start + share * (end - start)).astype(int)
    return f"#{r:02x}{g:02x}{b:02x}"


def heatmap_plot(report: EvaluationReport, spec: PlotSpec, path: str | Path) -> Path:
    """Column-sorted cv losses: x is K, y the quantile level, colour the loss."""
    data = heatmap_data(report)
    losses = data.sorted_losses
    n, width = losses.shape
    low, high = float(losses.min()), float(losses.max())

    canvas = SvgCanvas(spec.width, spec.height)
    left, top, plot_w, plot_h = _plot_area(spec)
    cell_w = plot_w / width
    cell_h = plot_h / n
    canvas.text(spec.width / 2, 22, f"{report.learner_name}: sorted validation losses", size=14)
    canvas.group_start("cells")
    for j in range(width):
        for i in range(n):
            # quantile level grows upwards
            y = top + plot_h - (i + 1) * cell_h
            canvas.rect(left + j * cell_w, y, cell_w, cell_h, fill=_heat_color(losses[i, j], low, high), css_class="cell")
    canvas.group_end()

    axes = Axes(left, top, plot_w, plot_h, -0.5, width - 0.5, 0.0, 1.0)
    tick_positions = integer_ticks(list(range(width)))
    canvas.group_start("axes")
    canvas.line(left, top + plot_h, left + plot_w, top + plot_h, css_class="axis")
    canvas.line(left, top, left, top + plot_h, css_class="axis")
    for j in tick_positions:
        canvas.text(axes.x(j), top + plot_h + 16, str(data.k_values[j]), size=10)
    for level in linear_ticks(0.0, 1.0, 4):
        canvas.text(left - 7, axes.y(level) + 3, f"{level:.2f}", size=10, anchor="end")
    canvas.text(left + plot_w / 2, top + plot_h + 34, spec.x_label, size=12)
    canvas.text(left - 45, top + plot_h / 2, "quantile level", size=12, rotate=-90)
    canvas.group_end()

    scale_x = left + plot_w + 30
    for step in range(11):
        value = low + (high - low) * step / 10
        canvas.rect(scale_x, top + plot_h - (step + 1) * plot_h / 11, 16, plot_h / 11, fill=_heat_color(value, low, high), css_class="scale")
    canvas.text(scale_x + 22, top + plot_h, f"{low:.3g}", size=10, anchor="start")
    canvas.text(scale_x + 22, top + 10, f"{high:.3g}", size=10, anchor="start")
    return canvas.save(path)


def distribution_plot(report: EvaluationReport, spec: PlotSpec, path: str | Path) -> Path:
    """Jittered dot plot of every observation's validation loss per K."""
    rows = dotplot_data(report)
    ks = report.k_values
    column = {k: j for j, k in enumerate(ks)}
    left, top, plot_w, plot_h = _plot_area(spec)
    y_max = max(max((r.loss for r in rows), default=0.0), report.criterion.tolerance)
    axes = Axes(left, top, plot_w, plot_h, -0.5, len(ks) - 0.5, 0.0, y_max * 1.05 if y_max > 0 else 1.0)

    canvas = SvgCanvas(spec.width, spec.height)
    canvas.text(spec.width / 2, 22, f"{report.learner_name}: validation loss by observation", size=14)
    canvas.group_start("axes")
    canvas.line(left, axes.bottom, axes.right, axes.bottom, css_class="axis")
    canvas.line(left, top, left, axes.bottom, css_class="axis")
    for j in integer_ticks(list(range(len(ks)))):
        canvas.text(axes.x(j), axes.bottom + 16, str(ks[j]), size=10)
    for value in linear_ticks(0.0, axes.y_max, 4):
        canvas.text(left - 7, axes.y(value) + 3, f"{value:.3g}", size=10, anchor="end")
    canvas.text(left + plot_w / 2, axes.bottom + 34, spec.x_label, size=12)
    canvas.text(left - 45, top + plot_h / 2, spec.y_label, size=12, rotate=-90)
    canvas.group_end()

    canvas.line(
        left, axes.y(report.criterion.tolerance), axes.right, axes.y(report.criterion.tolerance),
        stroke=spec.color("eps"), dash="6,4", css_class="eps-guide",
    )
    canvas.group_start("dots")
    for row in rows:
        j = column[row.k]
        canvas.circle(axes.x(j + row.jitter), axes.y(row.loss), 2.0, fill=_K_PALETTE[j % len(_K_PALETTE)], css_class="dot", opacity=0.7)
    canvas.group_end()
    return canvas.save(path)


def ratio_plot(report: EvaluationReport, spec: PlotSpec, path: str | Path) -> Path:
    """Point-and-line plot of total training loss over total validation loss per K."""
    series = train_validation_ratio(report)
    defined = [(k, r) for k, r in zip(series.k_values, series.ratios) if r is not None]
    left, top, plot_w, plot_h = _plot_area(spec)
    ks = report.k_values
    y_max = max([r for _, r in defined] + [1.0])
    axes = Axes(left, top, plot_w, plot_h, ks[0], ks[-1], 0.0, y_max * 1.05)

    canvas = SvgCanvas(spec.width, spec.height)
    canvas.text(spec.width / 2, 22, f"{report.learner_name}: training / validation loss", size=14)
    axes.draw_frame(canvas, integer_ticks(list(ks)), linear_ticks(0.0, axes.y_max, 4), spec.x_label, "ratio", tick_format="{:.3g}")
    canvas.line(left, axes.y(1.0), axes.right, axes.y(1.0), stroke=spec.color("eps"), dash="6,4", css_class="unit-guide")
    if defined:
        canvas.polyline([(axes.x(k), axes.y(r)) for k, r in defined], stroke=spec.color("mean_cv"), width=2.0, css_class="series ratio")
        for k, r in defined:
            canvas.circle(axes.x(k), axes.y(r), 3.0, fill=spec.color("mean_cv"), css_class="point")
    for i, note in enumerate(series.notes):
        canvas.text(axes.right + 10, top + 14 + 14 * i, note, size=10, anchor="start", css_class="note")
    return canvas.save(path)


def reconstruction_plot_1d(
    data: DataMatrix,
    codec: Codec,
    rows: Sequence[Hashable],
    path: str | Path,
    spec: Optional[PlotSpec] = None,
) -> Path:
    """
    Originals as solid lines with their reconstructions dotted on top.

    Raises:
        DomainError: Two-dimensional grid (use export_reconstruction_pairs) or unknown row id
        ShapeError: Codec dimension differs from the data
    """
    spec = spec or PlotSpec()
    if data.grid.is_two_d:
        raise DomainError(
            "reconstruction plots are one-dimensional only; export the matrices with "
            "export_reconstruction_pairs and image them externally"
        )
    if codec.t != data.t:
        raise ShapeError("codec data dimension", data.t, codec.t)
    positions = [data.row_position(row_id) for row_id in rows]
    originals = data.values[positions]
    recon = codec.reconstruct(originals)

    left, top, plot_w, plot_h = _plot_area(spec)
    low = float(min(originals.min(), recon.min()))
    high = float(max(originals.max(), recon.max()))
    axes = Axes(left, top, plot_w, plot_h, 0, data.t - 1, low, high if high > low else low + 1.0)

    canvas = SvgCanvas(spec.width, spec.height)
    canvas.text(spec.width / 2, 22, f"{codec.method.value} reconstruction, K={codec.k}", size=14)
    axes.draw_frame(
        canvas, linear_ticks(0, data.t - 1, 4), linear_ticks(axes.y_min, axes.y_max, 4), "grid point", "value", tick_format="{:.3g}"
    )
    grid_x = [axes.x(t) for t in range(data.t)]
    for i, row_id in enumerate(rows):
        color = _K_PALETTE[i % len(_K_PALETTE)]
        canvas.polyline(zip(grid_x, (axes.y(v) for v in originals[i])), stroke=color, width=1.5, css_class="original")
        canvas.polyline(zip(grid_x, (axes.y(v) for v in recon[i])), stroke=color, width=1.5, dash="2,3", css_class="reconstruction")
        canvas.text(axes.right + 10, top + 14 + 14 * i, f"row {row_id}", size=10, anchor="start", fill=color)
    return canvas.save(path)


def summary_grid_plot(
    cells: Sequence[tuple[int, str, EvaluationReport]],
    path: str | Path,
    spec: Optional[PlotSpec] = None,
    panel_width: int = 260,
    panel_height: int = 190,
) -> Path:
    """Summary panels laid out with one row per learner and one column per sample size."""
    spec = spec or PlotSpec()
    learners = list(dict.fromkeys(name for _, name, _ in cells))
    sizes = list(dict.fromkeys(n for n, _, _ in cells))
    canvas = SvgCanvas(40 + panel_width * len(sizes), 40 + panel_height * len(learners))
    canvas.text(canvas.width / 2, 22, "Sample-size experiment", size=14)
    for n, name, report in cells:
        row, col = learners.index(name), sizes.index(n)
        x0 = 20 + col * panel_width
        y0 = 40 + row * panel_height
        axes = _loss_axes(x0 + 30, y0 + 22, panel_width - 45, panel_height - 45, report)
        canvas.group_start("panel")
        qd = report.qualifying_dimension
        label = f"{name}, N={n}: " + (f"qd={qd}" if qd is not None else "not met")
        canvas.text(x0 + panel_width / 2, y0 + 12, label, size=11)
        _draw_summary(canvas, axes, report, spec, ticks=False)
        canvas.group_end()
    return canvas.save(path)


def export_reconstruction_pairs(
    data: DataMatrix,
    codec: Codec,
    rows: Sequence[Hashable],
    directory: str | Path,
) -> list[Path]:
    """
    Write original_<id>.csv and reconstruction_<id>.csv for each requested row,
    each reshaped to the grid (rows x cols for images).
    """
    if codec.t != data.t:
        raise ShapeError("codec data dimension", data.t, codec.t)
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    positions = [data.row_position(row_id) for row_id in rows]
    recon = codec.reconstruct(data.values[positions])
    shape = data.grid.dims if data.grid.is_two_d else (1, data.t)
    header = [f"c{j}" for j in range(shape[1])]

    written: list[Path] = []
    for i, row_id in enumerate(rows):
        for prefix, values in (("original", data.values[positions[i]]), ("reconstruction", recon[i])):
            target = out / f"{prefix}_{row_id}.csv"
            write_csv_array(target, values.reshape(shape), header)
            written.append(target)
    logger.info(f"Exported {len(rows)} reconstruction pair(s) to {out}")
    return written
