"""OpenTelemetry metrics configuration for command-line runs.

Instruments are always recorded through the OpenTelemetry API (no-op without
a provider). When CLARE_METRICS_ENABLED is set, an SDK MeterProvider with a
console exporter is installed so fit counts and durations are printed.
"""
import logging
import socket
from typing import Optional

from opentelemetry import metrics
from opentelemetry.sdk.metrics import MeterProvider
from opentelemetry.sdk.metrics.export import ConsoleMetricExporter, PeriodicExportingMetricReader
from opentelemetry.sdk.resources import SERVICE_NAME, SERVICE_VERSION, Resource

from src.core.config import settings

logger = logging.getLogger(__name__)

_meter_provider: Optional[MeterProvider] = None


def _create_resource() -> Resource:
    """Create OpenTelemetry resource with service attributes."""
    return Resource.create({
        SERVICE_NAME: settings.otel_service_name,
        SERVICE_VERSION: settings.otel_service_version,
        "service.instance.id": socket.gethostname(),
    })


def configure_telemetry() -> None:
    """Install a console-exporting MeterProvider if metrics are enabled."""
    global _meter_provider
    if not settings.metrics_enabled:
        logger.debug("Metrics export disabled (CLARE_METRICS_ENABLED not set)")
        return
    if _meter_provider is not None:
        return

    metric_reader = PeriodicExportingMetricReader(
        ConsoleMetricExporter(),
        export_interval_millis=settings.metrics_export_interval_ms,
    )
    _meter_provider = MeterProvider(resource=_create_resource(), metric_readers=[metric_reader])
    metrics.set_meter_provider(_meter_provider)

    logger.info(
        f"Metrics configured with console exporter for "
        f"{settings.otel_service_name} v{settings.otel_service_version}"
    )


def shutdown_telemetry() -> None:
    """Flush pending metrics before the process exits."""
    global _meter_provider
    if _meter_provider is not None:
        _meter_provider.shutdown()
        _meter_provider = None
