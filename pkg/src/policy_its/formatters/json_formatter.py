"""JSON formatter: a metadata block plus rows (or a free-form payload)."""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

from policy_its.formatters.protocols import ResultTable


def _clean(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    return value


class JSONFormatter:
    """Renders a ``ResultTable`` as indented JSON; EMPTY values are ``null``."""

    def format(self, table: ResultTable, **kwargs: Any) -> bytes:
        document: dict[str, Any] = {"metadata": table.metadata.model_dump(mode="json")}
        if table.payload is not None:
            document.update(table.payload)
        else:
            document["rows"] = table.rows
        return (json.dumps(_clean(document), indent=2, allow_nan=False) + "\n").encode("utf-8")

    def format_to_file(self, table: ResultTable, path: Path, **kwargs: Any) -> Path:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(self.format(table, **kwargs))
        return path

    @property
    def extension(self) -> str:
        return ".json"

    @property
    def content_type(self) -> str:
        return "application/json"
