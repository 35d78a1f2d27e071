"""Output formatters for result tables::

    from policy_its.formatters import CSVFormatter, JSONFormatter
"""

from __future__ import annotations

from policy_its.formatters.csv_formatter import CSVFormatter, read_result_csv
from policy_its.formatters.json_formatter import JSONFormatter
from policy_its.formatters.protocols import IOutputFormatter, OutputMetadata, ResultTable
from policy_its.formatters.rows import effect_row, temporal_row

__all__ = [
    "CSVFormatter",
    "IOutputFormatter",
    "JSONFormatter",
    "OutputMetadata",
    "ResultTable",
    "effect_row",
    "read_result_csv",
    "temporal_row",
]
