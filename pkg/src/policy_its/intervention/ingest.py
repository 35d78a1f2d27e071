"""Rollout CSV ingestion (area_id, month as YYYY-MM, count)."""

from __future__ import annotations

import logging
from collections import defaultdict
from datetime import date
from pathlib import Path

import pandas as pd

from policy_its.core.exceptions import DataValidationError
from policy_its.intervention.models import RolloutSeries
from policy_its.validation.models import ValidationIssue

log = logging.getLogger(__name__)

ROLLOUT_COLUMNS = ["area_id", "month", "count"]


def parse_month(text: str) -> date:
    year, _, month = text.strip().partition("-")
    if len(year) != 4 or len(month) != 2:
        raise ValueError(f"expected YYYY-MM, got {text!r}")
    return date(int(year), int(month), 1)


def format_month(month: date) -> str:
    return f"{month.year:04d}-{month.month:02d}"


def read_rollout_csv(path: Path) -> list[RolloutSeries]:
    """One series per area, months sorted; duplicate months are an error."""
    if not path.is_file():
        raise DataValidationError(f"Input file not found: {path}")
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as exc:
        raise DataValidationError(f"Malformed CSV {path}: {exc}") from exc
    missing = [c for c in ROLLOUT_COLUMNS if c not in frame.columns]
    if missing:
        raise DataValidationError(
            f"{path} is missing required columns",
            [ValidationIssue("missing column", field=c) for c in missing],
        )

    issues: list[ValidationIssue] = []
    by_area: dict[str, dict[date, int]] = defaultdict(dict)
    for offset, record in enumerate(frame.to_dict(orient="records")):
        row = offset + 2
        area_id = record["area_id"].strip()
        try:
            month = parse_month(record["month"])
        except ValueError:
            issues.append(ValidationIssue("expected YYYY-MM", row=row, field="month", value=record["month"]))
            continue
        try:
            count = int(record["count"].strip())
        except ValueError:
            issues.append(ValidationIssue("expected an integer", row=row, field="count", value=record["count"]))
            continue
        if count < 0:
            issues.append(ValidationIssue("count must be non-negative", row=row, field="count", value=str(count)))
            continue
        if month in by_area[area_id]:
            issues.append(ValidationIssue("duplicate month for area", row=row, field="month", value=record["month"]))
            continue
        by_area[area_id][month] = count
    if issues:
        raise DataValidationError(f"{path}: {len(issues)} invalid values", issues)

    series = []
    for area_id in sorted(by_area):
        months = sorted(by_area[area_id])
        series.append(
            RolloutSeries(area_id=area_id, months=tuple(months), counts=tuple(by_area[area_id][m] for m in months))
        )
    log.info("Read rollout series for %d areas from %s", len(series), path)
    return series
