"""Toolkit settings using Pydantic settings."""
import os

from pydantic import field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Process-level settings loaded from environment variables (prefix CLARE_)."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="CLARE_",
        case_sensitive=False,
        extra="ignore",
    )

    # Logging
    log_level: str = "INFO"
    log_format: str = "text"

    # Worker budget for (fold x K) tasks; 0 means available parallelism
    threads: int = 0

    # OpenTelemetry metrics (disabled unless explicitly switched on)
    metrics_enabled: bool = False
    metrics_export_interval_ms: int = 60000
    otel_service_name: str = "clare-toolkit"
    otel_service_version: str = "0.1.0"

    @field_validator("log_format", mode="before")
    @classmethod
    def parse_log_format(cls, v: str) -> str:
        """Accept TEXT/JSON in any case."""
        value = str(v).strip().lower()
        if value not in ("text", "json"):
            raise ValueError(f"log_format must be 'text' or 'json', got '{v}'")
        return value

    @field_validator("threads")
    @classmethod
    def check_threads(cls, v: int) -> int:
        if v < 0:
            raise ValueError("threads must be >= 0")
        return v

    @property
    def resolved_threads(self) -> int:
        """Worker count with the 0 = all cores convention applied."""
        if self.threads > 0:
            return self.threads
        return os.cpu_count() or 1

    @property
    def is_json_logging(self) -> bool:
        return self.log_format == "json"


# Global settings instance
settings = Settings()
