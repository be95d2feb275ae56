"""Plain-text key/value reports."""

from __future__ import annotations

import logging
from collections.abc import Mapping
from pathlib import Path

logger = logging.getLogger(__name__)


def format_value(value: object) -> str:
    """Floats with 17 significant digits, everything else as str."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def format_report(entries: Mapping[str, object]) -> str:
    """One ``key: value`` line per entry, in insertion order."""
    return "".join(f"{key}: {format_value(value)}\n" for key, value in entries.items())


def write_report(entries: Mapping[str, object], path: Path) -> Path:
    """Write a report file (UTF-8, LF endings)."""
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_report(entries), encoding="utf-8", newline="\n")
    logger.info("Wrote report %s", path)
    return path
