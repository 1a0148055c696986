"""Run metrics for OpenTelemetry instrumentation.

This module records toolkit metrics:
- Counters for codec fits and evaluation runs
- Histograms for fit and run durations
- Consistent tagging with method, status and outcome
"""
import time
from contextlib import contextmanager
from functools import lru_cache
from typing import Generator, Optional

from opentelemetry import metrics
from opentelemetry.metrics import Meter


class MetricsService:
    """Service for recording codec-fit and evaluation-run metrics."""

    def __init__(self, meter: Optional[Meter] = None):
        self._meter = meter or metrics.get_meter("clare.toolkit", "1.0.0")
        self._fits_total = self._meter.create_counter(
            name="clare_fits_total",
            description="Total number of codec fits",
            unit="1",
        )
        self._runs_total = self._meter.create_counter(
            name="clare_runs_total",
            description="Total number of cross-validated evaluation runs",
            unit="1",
        )
        self._fit_duration = self._meter.create_histogram(
            name="clare_fit_duration_seconds",
            description="Duration of a single codec fit plus reconstruction in seconds",
            unit="s",
        )
        self._run_duration = self._meter.create_histogram(
            name="clare_run_duration_seconds",
            description="Duration of a full evaluation run in seconds",
            unit="s",
        )

    def increment_fits(self, method: str, status: str = "success") -> None:
        """Increment codec fit counter."""
        self._fits_total.add(1, {"method": method, "status": status})

    def record_fit_duration(self, duration_seconds: float, method: str, status: str = "success") -> None:
        """Record codec fit duration."""
        self._fit_duration.record(duration_seconds, {"method": method, "status": status})

    def increment_runs(self, method: str, outcome: str) -> None:
        """Increment evaluation run counter (outcome: qualified, not_qualified, error)."""
        self._runs_total.add(1, {"method": method, "outcome": outcome})

    def record_run_duration(self, duration_seconds: float, method: str, outcome: str) -> None:
        self._run_duration.record(duration_seconds, {"method": method, "outcome": outcome})

    @contextmanager
    def track_fit(self, method: str) -> Generator[None, None, None]:
        """Context manager for tracking one (K, fold) fit."""
        start_time = time.perf_counter()
        status = "success"
        try:
            yield
        except Exception:
            status = "error"
            raise
        finally:
            duration = time.perf_counter() - start_time
            self.increment_fits(method, status)
            self.record_fit_duration(duration, method, status)


@lru_cache()
def get_metrics_service() -> MetricsService:
    """Get singleton metrics service instance."""
    return MetricsService()
