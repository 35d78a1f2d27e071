"""Onset months from monthly rollout counts.

A month qualifies when its count is positive and reaches the threshold; the
first qualifying month is final even if counts later fall back.
"""

from __future__ import annotations

from datetime import date

from policy_its.core.exceptions import DataValidationError
from policy_its.intervention.models import InterventionDefinition, RolloutSeries
from policy_its.validation.models import ValidationIssue


def _require_nonempty(series: RolloutSeries) -> None:
    if not series.counts:
        raise DataValidationError(
            f"Rollout series for area {series.area_id} is empty",
            [ValidationIssue("series has no months", field="area_id", value=series.area_id)],
        )


def awareness_month(series: RolloutSeries, threshold_pct: float) -> date | None:
    """First month with count >= threshold_pct % of the final month's count.

    Returns None (never aware) only for an all-zero series.
    """
    _require_nonempty(series)
    if not 0.0 < threshold_pct <= 100.0:
        raise DataValidationError(
            "threshold_pct must lie in (0, 100]",
            [ValidationIssue("out of range", field="threshold_pct", value=str(threshold_pct))],
        )
    # count >= pct/100 * final, kept in integer-friendly form
    target = threshold_pct * series.final_count
    for month, count in zip(series.months, series.counts):
        if count > 0 and count * 100.0 >= target:
            return month
    return None


def introduction_month(series: RolloutSeries) -> date | None:
    """First month with at least one recipient."""
    _require_nonempty(series)
    for month, count in zip(series.months, series.counts):
        if count >= 1:
            return month
    return None


def onset_month(series: RolloutSeries, definition: InterventionDefinition) -> date | None:
    if definition.kind == "introduction":
        return introduction_month(series)
    assert definition.pct is not None
    return awareness_month(series, definition.pct)
