"""Merge config file values and command-line overrides into a validated RunConfig."""
import logging
from pathlib import Path
from typing import Mapping, Optional

from pydantic import ValidationError

from src.core.exceptions import ConfigError
from src.repositories.key_value_file import read_key_value_file
from src.schemas.run_config import RunConfig

logger = logging.getLogger(__name__)


def parse_overrides(pairs: list[str]) -> dict[str, str]:
    """Turn repeated --set key=value arguments into a dict (later wins)."""
    overrides: dict[str, str] = {}
    for pair in pairs:
        if "=" not in pair:
            raise ConfigError(f"--set expects key=value, got '{pair}'")
        key, value = (part.strip() for part in pair.split("=", 1))
        if not key:
            raise ConfigError(f"--set has an empty key in '{pair}'")
        overrides[key] = value
    return overrides


def _field_key(loc: tuple) -> Optional[str]:
    return str(loc[0]) if loc else None


def load_run_config(
    config_path: Optional[str | Path] = None,
    overrides: Optional[Mapping[str, str]] = None,
) -> RunConfig:
    """
    Build a RunConfig from defaults, then the config file, then overrides.

    Raises:
        OSError: Config file cannot be read
        ConfigError: Syntax errors (with line numbers) or invalid values (naming the key)
    """
    file_values: dict[str, str] = {}
    file_lines: dict[str, int] = {}
    if config_path is not None:
        for entry in read_key_value_file(config_path):
            file_values[entry.key] = entry.value
            file_lines[entry.key] = entry.line
        logger.debug(f"Read {len(file_values)} key(s) from {config_path}")

    cli_values = dict(overrides or {})
    merged = {**file_values, **cli_values}
    try:
        return RunConfig.model_validate(merged)
    except ValidationError as exc:
        first = exc.errors()[0]
        key = _field_key(first.get("loc", ()))
        line = file_lines.get(key) if key is not None and key not in cli_values else None
        source = f" in {config_path}" if line is not None else ""
        if first.get("type") == "extra_forbidden":
            message = f"unknown config key '{key}'{source}"
        elif key:
            message = f"invalid value for '{key}'{source}: {first.get('msg')}"
        else:
            message = f"invalid configuration{source}: {first.get('msg')}"
        raise ConfigError(message, key=key, line=line) from exc
