"""Run manifests: everything needed to repeat a command's outputs."""

from __future__ import annotations

import json
import logging
import platform
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

from beliefs.config import __version__

logger = logging.getLogger(__name__)

UTC = timezone.utc

MANIFEST_NAME = "manifest.json"


def utcnow() -> datetime:
    """Current UTC time, timezone-aware."""
    return datetime.now(UTC)


@dataclass
class RunManifest:
    """Parameters of one CLI run, written before any result.

    ``argv`` reproduces the run; the rest records what it resolved to.
    """

    subcommand: str
    scenario_source: str
    argv: list[str]
    output_dir: str
    seed: int | None = None
    grid: dict[str, int] = field(default_factory=dict)
    parameters: dict[str, Any] = field(default_factory=dict)
    tool_version: str = __version__
    python_version: str = field(default_factory=platform.python_version)
    started_at: str = field(default_factory=lambda: utcnow().isoformat(timespec="seconds"))

    def to_json(self) -> str:
        """Pretty-printed JSON with sorted keys."""
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"

    def write(self, out_dir: Path) -> Path:
        """Write manifest.json into out_dir (created if needed)."""
        out_dir.mkdir(parents=True, exist_ok=True)
        path = out_dir / MANIFEST_NAME
        path.write_text(self.to_json(), encoding="utf-8", newline="\n")
        logger.info("Wrote run manifest %s", path)
        return path
