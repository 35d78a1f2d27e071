"""CSV formatter: ``#`` metadata header lines, then one row per cell."""

from __future__ import annotations

import io
from pathlib import Path
from typing import Any

import pandas as pd

from policy_its.formatters.protocols import ResultTable

# EMPTY cells and missing intervals are written as this marker.
NULL_MARKER = "NA"


class CSVFormatter:
    """Renders a ``ResultTable`` as CSV with a commented metadata header."""

    def format(self, table: ResultTable, **kwargs: Any) -> bytes:
        if table.payload is not None and not table.rows:
            raise ValueError(f"{table.name} has no rows; write it as JSON")
        buffer = io.StringIO()
        for line in table.metadata.header_lines():
            buffer.write(f"# {line}\n")
        frame = pd.DataFrame(table.rows, columns=table.columns())
        frame.to_csv(buffer, index=False, na_rep=NULL_MARKER, lineterminator="\n", float_format="%.10g")
        return buffer.getvalue().encode("utf-8")

    def format_to_file(self, table: ResultTable, path: Path, **kwargs: Any) -> Path:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(self.format(table, **kwargs))
        return path

    @property
    def extension(self) -> str:
        return ".csv"

    @property
    def content_type(self) -> str:
        return "text/csv"


def read_result_csv(path: Path) -> pd.DataFrame:
    """Read a CSV written by ``CSVFormatter`` back into a frame."""
    return pd.read_csv(path, comment="#", na_values=[NULL_MARKER], keep_default_na=False)
