"""Tests for result tables, row flattening and the CSV/JSON formatters."""

from __future__ import annotations

import json
import math
from pathlib import Path

import pytest

from policy_its._version import __version__
from policy_its.effects.models import EffectSummary, Interval, TemporalRow
from policy_its.formatters import (
    CSVFormatter,
    IOutputFormatter,
    JSONFormatter,
    OutputMetadata,
    ResultTable,
    effect_row,
    read_result_csv,
    temporal_row,
)


def _metadata(**settings: object) -> OutputMetadata:
    return OutputMetadata(
        config_hash="ab" * 32,
        seed=7,
        manifest_digest="d1",
        manifest_path="artifacts/manifest.json",
        definition="awareness_25",
        settings=dict(settings),
    )


def _ok(area: str, median: float) -> EffectSummary:
    interval = Interval(median=median, lower=median - 0.1, upper=median + 0.1)
    return EffectSummary(
        cell={"area_id": area},
        rho=interval,
        ratio=interval,
        n_observations={"exposed_after": 3, "exposed_before": 4, "control_after": 5, "control_before": 6},
    )


def _empty(area: str) -> EffectSummary:
    return EffectSummary(
        cell={"area_id": area},
        status="empty",
        reason="no observations in exposed_after",
        n_observations={"exposed_before": 2},
    )


def _table() -> ResultTable:
    return ResultTable(
        name="rho_by_area",
        metadata=_metadata(adjustment="multiplicative"),
        rows=[effect_row(_ok("A01", 0.2)), effect_row(_empty("A02"))],
    )


class TestOutputMetadata:
    def test_header_lines(self) -> None:
        lines = _metadata(level=0.95, adjustment="additive").header_lines()
        assert lines[0] == f"config_hash: {'ab' * 32}"
        assert lines[2] == f"engine_version: {__version__}"
        assert lines[3] == "manifest: artifacts/manifest.json (d1)"
        assert lines[4] == "definition: awareness_25"
        assert lines[5:] == ["adjustment: additive", "level: 0.95"]

    def test_definition_is_optional(self) -> None:
        lines = OutputMetadata(config_hash="x", seed=1).header_lines()
        assert not any(line.startswith("definition") for line in lines)


class TestRows:
    def test_effect_row_columns(self) -> None:
        row = effect_row(_ok("A01", 0.2))
        assert row["area_id"] == "A01"
        assert row["status"] == "OK"
        assert row["rho_median"] == pytest.approx(0.2)
        assert row["n_control_before"] == 6
        assert row["prevalence_exposed_median"] is None
        assert row["excluded_draws"] == 0

    def test_empty_row_keeps_every_column(self) -> None:
        full, empty = effect_row(_ok("A01", 0.2)), effect_row(_empty("A02"))
        assert list(full) == list(empty)
        assert empty["status"] == "EMPTY"
        assert empty["reason"] == "no observations in exposed_after"
        assert empty["rho_lower"] is None
        assert empty["n_exposed_after"] == 0

    def test_cell_override(self) -> None:
        row = effect_row(_ok("A01", 0.2), cell={"dimension": "sex", "level": "male"})
        assert "area_id" not in row
        assert (row["dimension"], row["level"]) == ("sex", "male")

    def test_temporal_row(self) -> None:
        row = temporal_row(
            TemporalRow(period="year=-1", year=-1, n_exposed=5, n_control=9, ratio=Interval(median=2, lower=1, upper=3))
        )
        assert row["year"] == -1
        assert row["ratio_upper"] == 3
        assert row["prevalence_control_median"] is None

    def test_columns_in_first_seen_order(self) -> None:
        table = ResultTable(name="t", metadata=_metadata(), rows=[{"a": 1, "b": 2}, {"c": 3, "a": 4}])
        assert table.columns() == ["a", "b", "c"]


class TestCSVFormatter:
    def test_satisfies_protocol(self) -> None:
        assert isinstance(CSVFormatter(), IOutputFormatter)
        assert CSVFormatter().extension == ".csv"

    def test_header_then_rows(self) -> None:
        text = CSVFormatter().format(_table()).decode("utf-8")
        lines = text.splitlines()
        assert lines[0] == f"# config_hash: {'ab' * 32}"
        assert lines[-1].startswith("A02,EMPTY,no observations in exposed_after")
        assert ",NA," in lines[-1]

    def test_round_trip_through_reader(self, tmp_path: Path) -> None:
        path = CSVFormatter().format_to_file(_table(), tmp_path / "nested" / "rho_by_area.csv")
        frame = read_result_csv(path)
        assert list(frame["area_id"]) == ["A01", "A02"]
        assert frame.loc[0, "rho_median"] == pytest.approx(0.2)
        assert math.isnan(frame.loc[1, "rho_median"])
        assert frame.loc[1, "n_exposed_before"] == 2

    def test_payload_only_table_is_rejected(self) -> None:
        table = ResultTable(name="plot_data", metadata=_metadata(), payload={"series": []})
        with pytest.raises(ValueError, match="write it as JSON"):
            CSVFormatter().format(table)

    def test_bytes_are_deterministic(self) -> None:
        assert CSVFormatter().format(_table()) == CSVFormatter().format(_table())


class TestJSONFormatter:
    def test_satisfies_protocol(self) -> None:
        assert isinstance(JSONFormatter(), IOutputFormatter)
        assert JSONFormatter().content_type == "application/json"

    def test_rows_and_metadata(self) -> None:
        document = json.loads(JSONFormatter().format(_table()))
        assert document["metadata"]["seed"] == 7
        assert document["metadata"]["settings"] == {"adjustment": "multiplicative"}
        assert document["rows"][1]["rho_median"] is None

    def test_payload_replaces_rows(self) -> None:
        table = ResultTable(name="plot_data", metadata=_metadata(), payload={"area_rho": [{"rho": float("nan")}]})
        document = json.loads(JSONFormatter().format(table))
        assert "rows" not in document
        assert document["area_rho"] == [{"rho": None}]

    def test_format_to_file(self, tmp_path: Path) -> None:
        path = JSONFormatter().format_to_file(_table(), tmp_path / "rho_by_area.json")
        assert path.read_bytes().endswith(b"\n")
        assert json.loads(path.read_text())["rows"][0]["area_id"] == "A01"
