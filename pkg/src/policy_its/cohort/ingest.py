"""CSV ingestion for person-year records and area attributes.

Column layouts are documented in ``schema/README.md``. Reported row numbers
are file line numbers (the header is line 1).
"""

from __future__ import annotations

import logging
from pathlib import Path

import pandas as pd
from pydantic import ValidationError

from policy_its.cohort.dictionary import DataDictionary
from policy_its.cohort.exposure import derive_exposure
from policy_its.cohort.ghq import GHQ_ITEM_COUNT, dichotomize_ghq
from policy_its.cohort.models import AreaAttributes, RawResponse
from policy_its.core.exceptions import DataValidationError
from policy_its.validation.models import ValidationIssue

log = logging.getLogger(__name__)

GHQ_COLUMNS = [f"ghq_{i}" for i in range(1, GHQ_ITEM_COUNT + 1)]
COHORT_COLUMNS = [
    "person_id",
    "area_id",
    "interview_year",
    *GHQ_COLUMNS,
    "employment_status",
    "age",
    "education",
    "ethnicity",
    "marital_status",
    "sex",
    "base_weight",
    "wave_responses",
]
AREA_COLUMNS = ["area_id", "imd_score", "ethnic_minority_proportion"]

_CATEGORICAL_FIELDS = ("education", "ethnicity", "marital_status", "sex")


def _read_strings(path: Path, required: list[str]) -> pd.DataFrame:
    if not path.is_file():
        raise DataValidationError(f"Input file not found: {path}")
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as exc:
        raise DataValidationError(f"Malformed CSV {path}: {exc}") from exc
    missing = [c for c in required if c not in frame.columns]
    if missing:
        raise DataValidationError(
            f"{path} is missing required columns",
            [ValidationIssue("missing column", field=c) for c in missing],
        )
    return frame


def _parse_int(raw: str, row: int, field: str, issues: list[ValidationIssue]) -> int | None:
    try:
        return int(raw.strip())
    except ValueError:
        issues.append(ValidationIssue("expected an integer", row=row, field=field, value=raw))
        return None


def _parse_float(raw: str, row: int, field: str, issues: list[ValidationIssue]) -> float | None:
    try:
        return float(raw.strip())
    except ValueError:
        issues.append(ValidationIssue("expected a number", row=row, field=field, value=raw))
        return None


def _parse_waves(raw: str, row: int, issues: list[ValidationIssue]) -> tuple[bool, ...]:
    text = raw.strip()
    if any(ch not in "01" for ch in text):
        issues.append(
            ValidationIssue("expected a string of 0/1 wave flags", row=row, field="wave_responses", value=raw)
        )
        return ()
    return tuple(ch == "1" for ch in text)


def _parse_cohort_row(
    record: dict[str, str],
    row: int,
    dictionary: DataDictionary,
) -> tuple[RawResponse | None, list[ValidationIssue]]:
    issues: list[ValidationIssue] = []

    year = _parse_int(record["interview_year"], row, "interview_year", issues)
    age = _parse_int(record["age"], row, "age", issues)
    items = [_parse_int(record[c], row, c, issues) for c in GHQ_COLUMNS]

    weight_raw = record["base_weight"].strip()
    base_weight = _parse_float(weight_raw, row, "base_weight", issues) if weight_raw else None
    waves = _parse_waves(record["wave_responses"], row, issues)

    if all(i is not None for i in items):
        try:
            dichotomize_ghq([int(i) for i in items if i is not None])
        except DataValidationError as exc:
            issues.extend(
                ValidationIssue(i.message, row=row, field=i.field, value=i.value) for i in exc.issues
            )

    status = record["employment_status"].strip()
    try:
        derive_exposure(status, dictionary)
    except DataValidationError:
        issues.append(ValidationIssue("unknown employment status", row=row, field="employment_status", value=status))

    for name in _CATEGORICAL_FIELDS:
        value = record[name].strip()
        if value not in dictionary.levels(name):
            issues.append(ValidationIssue("undeclared level", row=row, field=name, value=value))

    if issues or year is None or age is None:
        return None, issues

    try:
        parsed = RawResponse(
            person_id=record["person_id"].strip(),
            area_id=record["area_id"].strip(),
            interview_year=year,
            ghq_items=tuple(int(i) for i in items if i is not None),
            employment_status=status,
            age=age,
            education=record["education"].strip(),
            ethnicity=record["ethnicity"].strip(),
            marital_status=record["marital_status"].strip(),
            sex=record["sex"].strip(),
            base_weight=base_weight,
            wave_responses=waves,
        )
    except ValidationError as exc:
        return None, [ValidationIssue(str(err["msg"]), row=row, field=str(err["loc"][0])) for err in exc.errors()]
    return parsed, []


def read_cohort_csv(path: Path, dictionary: DataDictionary) -> list[RawResponse]:
    """Parse and validate every row; raise one error listing all bad rows."""
    frame = _read_strings(path, COHORT_COLUMNS)
    records: list[RawResponse] = []
    issues: list[ValidationIssue] = []
    for offset, record in enumerate(frame.to_dict(orient="records")):
        parsed, row_issues = _parse_cohort_row(record, offset + 2, dictionary)
        issues.extend(row_issues)
        if parsed is not None:
            records.append(parsed)
    if issues:
        raise DataValidationError(f"{path}: {len(issues)} invalid values", issues)
    log.info("Read %d person-year records from %s", len(records), path)
    return records


def read_areas_csv(path: Path) -> list[AreaAttributes]:
    """Parse the area attribute table (area_id, imd_score, ethnic_minority_proportion)."""
    frame = _read_strings(path, AREA_COLUMNS)
    areas: list[AreaAttributes] = []
    issues: list[ValidationIssue] = []
    seen: set[str] = set()
    for offset, record in enumerate(frame.to_dict(orient="records")):
        row = offset + 2
        area_id = record["area_id"].strip()
        if area_id in seen:
            issues.append(ValidationIssue("duplicate area_id", row=row, field="area_id", value=area_id))
            continue
        seen.add(area_id)
        imd = _parse_float(record["imd_score"], row, "imd_score", issues)
        share = _parse_float(record["ethnic_minority_proportion"], row, "ethnic_minority_proportion", issues)
        if imd is None or share is None:
            continue
        try:
            areas.append(AreaAttributes(area_id=area_id, imd_score=imd, ethnic_minority_proportion=share))
        except ValidationError as exc:
            issues.extend(
                ValidationIssue(str(err["msg"]), row=row, field=str(err["loc"][0])) for err in exc.errors()
            )
    if issues:
        raise DataValidationError(f"{path}: {len(issues)} invalid values", issues)
    log.info("Read %d areas from %s", len(areas), path)
    return areas
