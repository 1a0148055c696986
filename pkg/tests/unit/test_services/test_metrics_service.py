"""
Unit tests for MetricsService.

Tests cover:
- Fit counters and durations with method/status attributes
- track_fit success and error paths
- Run counters by outcome
"""
import pytest

from src.services.metrics_service import MetricsService, get_metrics_service


def points(reader, name: str) -> list:
    found = []
    for resource in reader.get_metrics_data().resource_metrics:
        for scope in resource.scope_metrics:
            for metric in scope.metrics:
                if metric.name == name:
                    found.extend(metric.data.data_points)
    return found


class TestMetricsService:

    @pytest.mark.unit
    def test_track_fit_success(self, metrics_service, metrics_reader):
        # Act
        with metrics_service.track_fit("pca"):
            pass

        # Assert
        [counter] = points(metrics_reader, "clare_fits_total")
        assert counter.value == 1
        assert dict(counter.attributes) == {"method": "pca", "status": "success"}
        [histogram] = points(metrics_reader, "clare_fit_duration_seconds")
        assert histogram.count == 1

    @pytest.mark.unit
    def test_track_fit_error_is_reraised_and_counted(self, metrics_service, metrics_reader):
        with pytest.raises(RuntimeError):
            with metrics_service.track_fit("ae"):
                raise RuntimeError("diverged")

        [counter] = points(metrics_reader, "clare_fits_total")
        assert dict(counter.attributes) == {"method": "ae", "status": "error"}

    @pytest.mark.unit
    def test_runs_by_outcome(self, metrics_service, metrics_reader):
        metrics_service.increment_runs("dwt", "qualified")
        metrics_service.increment_runs("dwt", "qualified")
        metrics_service.increment_runs("dwt", "not_qualified")
        metrics_service.record_run_duration(0.5, "dwt", "qualified")

        by_outcome = {p.attributes["outcome"]: p.value for p in points(metrics_reader, "clare_runs_total")}
        assert by_outcome == {"qualified": 2, "not_qualified": 1}
        [duration] = points(metrics_reader, "clare_run_duration_seconds")
        assert duration.sum == pytest.approx(0.5)

    @pytest.mark.unit
    def test_default_meter(self):
        assert isinstance(MetricsService(), MetricsService)
        assert isinstance(get_metrics_service(), MetricsService)
