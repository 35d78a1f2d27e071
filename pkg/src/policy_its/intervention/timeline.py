"""Per-area awareness years and centered ITS time variables."""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field

from policy_its.core.exceptions import DataValidationError
from policy_its.intervention.models import (
    CenteredTime,
    InterventionDefinition,
    InterventionTimeline,
    RolloutSeries,
    default_sensitivity_definitions,
)
from policy_its.intervention.rollout import onset_month
from policy_its.validation.models import ValidationIssue

log = logging.getLogger(__name__)


def center_time(
    interview_year: int,
    awareness_year: int | None,
    *,
    window: tuple[int, int] | None = None,
) -> CenteredTime:
    """Center *interview_year* on the awareness year.

    A never-aware area is centered on the sentinel ``window[1] + 1`` so every
    one of its rows is pre-intervention; *window* is then required.
    """
    if window is not None and not window[0] <= interview_year <= window[1]:
        raise DataValidationError(
            "Interview year outside the study window",
            [ValidationIssue(f"window is {window[0]}..{window[1]}", field="interview_year", value=str(interview_year))],
        )
    if awareness_year is None:
        if window is None:
            raise DataValidationError("Centering a never-aware area needs the study window")
        awareness_year = window[1] + 1
    year = interview_year - awareness_year
    return CenteredTime(year=year, intervention=int(year >= 0), year_post=max(year, 0))  # type: ignore[arg-type]


@dataclass
class TimelineSet:
    """Timelines for every area under one definition."""

    definition: InterventionDefinition
    window: tuple[int, int]
    timelines: dict[str, InterventionTimeline] = field(default_factory=dict)

    @property
    def never_aware(self) -> list[str]:
        return sorted(a for a, t in self.timelines.items() if t.never)

    def awareness_year(self, area_id: str) -> int | None:
        return self.timelines[area_id].awareness_year

    def center(self, area_id: str, interview_year: int) -> CenteredTime:
        return center_time(interview_year, self.awareness_year(area_id), window=self.window)

    def as_dict(self) -> dict[str, int | None]:
        return {area_id: t.awareness_year for area_id, t in sorted(self.timelines.items())}


def build_timelines(
    series: Sequence[RolloutSeries],
    definition: InterventionDefinition,
    window: tuple[int, int],
) -> TimelineSet:
    """Derive every area's awareness year; never-aware areas stay as controls."""
    result = TimelineSet(definition=definition, window=window)
    for s in series:
        if s.area_id in result.timelines:
            raise DataValidationError(
                "Duplicate rollout series",
                [ValidationIssue("area appears twice", field="area_id", value=s.area_id)],
            )
        month = onset_month(s, definition)
        result.timelines[s.area_id] = InterventionTimeline(
            area_id=s.area_id,
            awareness_year=month.year if month is not None else None,
            definition=definition,
        )
    never = result.never_aware
    if never:
        log.warning(
            "%d of %d areas never reach %s; kept as never-intervened controls",
            len(never),
            len(result.timelines),
            definition.label,
        )
    log.info("Built %d timelines for %s", len(result.timelines), definition.label)
    return result


def sensitivity_definitions() -> list[InterventionDefinition]:
    """Introduction plus awareness at 5, 15, 25, 35 and 45 %."""
    return default_sensitivity_definitions()
