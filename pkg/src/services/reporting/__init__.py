"""Report emitters: plot data tables and static SVG figures."""
from src.services.reporting.plot_data import (
    HeatmapData,
    dotplot_data,
    heatmap_data,
    train_validation_ratio,
    write_dotplot_csv,
    write_heatmap_csv,
    write_ratio_csv,
)
from src.services.reporting.plots import (
    PlotSpec,
    distribution_plot,
    export_reconstruction_pairs,
    heatmap_plot,
    ratio_plot,
    reconstruction_plot_1d,
    summary_grid_plot,
    summary_plot,
)

__all__ = [
    "HeatmapData",
    "PlotSpec",
    "distribution_plot",
    "dotplot_data",
    "export_reconstruction_pairs",
    "heatmap_data",
    "heatmap_plot",
    "ratio_plot",
    "reconstruction_plot_1d",
    "summary_grid_plot",
    "summary_plot",
    "train_validation_ratio",
    "write_dotplot_csv",
    "write_heatmap_csv",
    "write_ratio_csv",
]
