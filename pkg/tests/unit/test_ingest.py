"""Tests for cohort and area CSV ingestion."""

from __future__ import annotations

from pathlib import Path

import pytest

from policy_its.cohort.dictionary import DataDictionary
from policy_its.cohort.ingest import AREA_COLUMNS, COHORT_COLUMNS, read_areas_csv, read_cohort_csv
from policy_its.core.exceptions import DataValidationError


def _cohort_row(**overrides: str) -> dict[str, str]:
    row = {c: "0" for c in COHORT_COLUMNS}
    row.update(
        {
            "person_id": "p1",
            "area_id": "A01",
            "interview_year": "2015",
            "employment_status": "unemployed",
            "age": "33",
            "education": "degree or higher",
            "ethnicity": "white",
            "marital_status": "unmarried",
            "sex": "male",
            "base_weight": "1.25",
            "wave_responses": "110",
        }
    )
    row.update(overrides)
    return row


def _write(path: Path, columns: list[str], rows: list[dict[str, str]]) -> Path:
    lines = [",".join(columns)] + [",".join(row[c] for c in columns) for row in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


class TestReadCohortCsv:
    def test_valid_rows(self, tmp_path: Path, dictionary: DataDictionary) -> None:
        rows = [_cohort_row(), _cohort_row(person_id="p2", ghq_1="3", base_weight="")]
        records = read_cohort_csv(_write(tmp_path / "c.csv", COHORT_COLUMNS, rows), dictionary)
        assert len(records) == 2
        first, second = records
        assert first.wave_responses == (True, True, False)
        assert first.base_weight == pytest.approx(1.25)
        assert first.ghq_items == (0,) * 12
        assert second.base_weight is None
        assert second.ghq_items[0] == 3

    def test_all_bad_rows_reported_with_line_numbers(self, tmp_path: Path, dictionary: DataDictionary) -> None:
        rows = [
            _cohort_row(),
            _cohort_row(age="thirty"),
            _cohort_row(ghq_4="5"),
            _cohort_row(employment_status="astronaut", ethnicity="martian"),
        ]
        with pytest.raises(DataValidationError) as excinfo:
            read_cohort_csv(_write(tmp_path / "c.csv", COHORT_COLUMNS, rows), dictionary)
        located = {(i.row, i.field) for i in excinfo.value.issues}
        assert located == {
            (3, "age"),
            (4, "ghq_items[3]"),
            (5, "employment_status"),
            (5, "ethnicity"),
        }
        assert excinfo.value.exit_code == 2

    def test_bad_wave_flags(self, tmp_path: Path, dictionary: DataDictionary) -> None:
        path = _write(tmp_path / "c.csv", COHORT_COLUMNS, [_cohort_row(wave_responses="1x1")])
        with pytest.raises(DataValidationError) as excinfo:
            read_cohort_csv(path, dictionary)
        assert excinfo.value.issues[0].field == "wave_responses"

    def test_missing_column(self, tmp_path: Path, dictionary: DataDictionary) -> None:
        columns = [c for c in COHORT_COLUMNS if c != "sex"]
        path = _write(tmp_path / "c.csv", columns, [_cohort_row()])
        with pytest.raises(DataValidationError) as excinfo:
            read_cohort_csv(path, dictionary)
        assert [i.field for i in excinfo.value.issues] == ["sex"]

    def test_missing_file(self, tmp_path: Path, dictionary: DataDictionary) -> None:
        with pytest.raises(DataValidationError, match="not found"):
            read_cohort_csv(tmp_path / "absent.csv", dictionary)


class TestReadAreasCsv:
    def test_valid(self, tmp_path: Path) -> None:
        rows = [
            {"area_id": "A01", "imd_score": "12.5", "ethnic_minority_proportion": "0.1"},
            {"area_id": "A02", "imd_score": "30", "ethnic_minority_proportion": "0.4"},
        ]
        areas = read_areas_csv(_write(tmp_path / "a.csv", AREA_COLUMNS, rows))
        assert [a.area_id for a in areas] == ["A01", "A02"]
        assert areas[1].imd_score == pytest.approx(30.0)

    def test_duplicate_and_out_of_range(self, tmp_path: Path) -> None:
        rows = [
            {"area_id": "A01", "imd_score": "12.5", "ethnic_minority_proportion": "0.1"},
            {"area_id": "A01", "imd_score": "13", "ethnic_minority_proportion": "0.2"},
            {"area_id": "A03", "imd_score": "9", "ethnic_minority_proportion": "1.5"},
            {"area_id": "A04", "imd_score": "n/a", "ethnic_minority_proportion": "0.2"},
        ]
        with pytest.raises(DataValidationError) as excinfo:
            read_areas_csv(_write(tmp_path / "a.csv", AREA_COLUMNS, rows))
        located = {(i.row, i.field) for i in excinfo.value.issues}
        assert located == {(3, "area_id"), (4, "ethnic_minority_proportion"), (5, "imd_score")}
