"""Result tables and the output formatter protocol.

Every emitted file carries the same metadata block: config hash, seed,
engine version and a reference to the layout manifest it was computed from.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Protocol, runtime_checkable

from pydantic import BaseModel, Field

from policy_its._version import __version__


class OutputMetadata(BaseModel):
    """Provenance stamped into every output file."""

    config_hash: str
    seed: int
    engine_version: str = __version__
    manifest_digest: str = ""
    manifest_path: str = ""
    definition: str = ""
    settings: dict[str, Any] = Field(default_factory=dict)

    def header_lines(self) -> list[str]:
        lines = [
            f"config_hash: {self.config_hash}",
            f"seed: {self.seed}",
            f"engine_version: {self.engine_version}",
            f"manifest: {self.manifest_path} ({self.manifest_digest})",
        ]
        if self.definition:
            lines.append(f"definition: {self.definition}")
        lines.extend(f"{key}: {value}" for key, value in sorted(self.settings.items()))
        return lines


@dataclass
class ResultTable:
    """Named rows (or a free-form payload) plus their provenance."""

    name: str
    metadata: OutputMetadata
    rows: list[dict[str, Any]] = field(default_factory=list)
    payload: dict[str, Any] | None = None

    def columns(self) -> list[str]:
        """Union of row keys in first-seen order."""
        seen: dict[str, None] = {}
        for row in self.rows:
            seen.update(dict.fromkeys(row))
        return list(seen)


@runtime_checkable
class IOutputFormatter(Protocol):
    """Renders a ``ResultTable`` to bytes (CSV, JSON)."""

    def format(self, table: ResultTable, **kwargs: Any) -> bytes:
        ...

    def format_to_file(self, table: ResultTable, path: Path, **kwargs: Any) -> Path:
        """Render and write to *path*. Returns the path."""
        ...

    @property
    def extension(self) -> str:
        ...

    @property
    def content_type(self) -> str:
        ...


__all__ = ["IOutputFormatter", "OutputMetadata", "ResultTable"]
