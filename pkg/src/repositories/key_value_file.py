"""Flat key=value text files (run configs and run metadata)."""
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from src.core.exceptions import ConfigError


@dataclass(frozen=True)
class KeyValueEntry:
    key: str
    value: str
    line: int


def parse_key_value_text(text: str) -> list[KeyValueEntry]:
    """
    Parse key=value lines. Blank lines and lines starting with '#' are skipped.

    Raises:
        ConfigError: A line without '=', an empty key, or a repeated key
    """
    entries: list[KeyValueEntry] = []
    seen: dict[str, int] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"expected key=value, found '{line}'", line=line_no)
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError("empty key", line=line_no)
        if key in seen:
            raise ConfigError(f"duplicate key '{key}' (first set on line {seen[key]})", key=key, line=line_no)
        seen[key] = line_no
        entries.append(KeyValueEntry(key=key, value=value, line=line_no))
    return entries


def read_key_value_file(path: str | Path) -> list[KeyValueEntry]:
    return parse_key_value_text(Path(path).read_text(encoding="utf-8"))


def write_key_value_file(path: str | Path, items: Iterable[tuple[str, object]]) -> None:
    """Write items in the given order, one key=value per line."""
    lines = [f"{key}={'' if value is None else value}" for key, value in items]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
