"""Root logger configuration for command-line runs."""
import json
import logging
import sys
from datetime import datetime, timezone
from typing import Optional

from src.core.config import settings


class UTCJsonFormatter(logging.Formatter):
    """Structured JSON formatter with UTC timestamps."""

    def format(self, record: logging.LogRecord) -> str:
        log_entry = {
            "timestamp": datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%f")[:-3] + "Z",
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
        }
        if record.exc_info:
            log_entry["exception"] = self.formatException(record.exc_info)
        return json.dumps(log_entry)


def configure_logging(level: Optional[str] = None, json_format: Optional[bool] = None) -> None:
    """
    Configure the root logger once per process.

    Logs go to stderr; stdout is reserved for command results.

    Args:
        level: Overrides settings.log_level when given
        json_format: Overrides settings.log_format when given
    """
    log_level = (level or settings.log_level).upper()
    use_json = settings.is_json_logging if json_format is None else json_format

    root_logger = logging.getLogger()
    root_logger.setLevel(log_level)

    # Clear existing handlers
    root_logger.handlers.clear()

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(log_level)

    if use_json:
        formatter: logging.Formatter = UTCJsonFormatter()
    else:
        formatter = logging.Formatter("%(asctime)s - %(name)s - %(levelname)s - %(message)s")

    console_handler.setFormatter(formatter)
    root_logger.addHandler(console_handler)
