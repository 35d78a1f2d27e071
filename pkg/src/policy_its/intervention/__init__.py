"""Intervention timing: rollout series to per-area awareness years."""

from policy_its.intervention.ingest import format_month, parse_month, read_rollout_csv
from policy_its.intervention.models import (
    CenteredTime,
    InterventionDefinition,
    InterventionTimeline,
    RolloutSeries,
    default_sensitivity_definitions,
)
from policy_its.intervention.rollout import awareness_month, introduction_month, onset_month
from policy_its.intervention.timeline import TimelineSet, build_timelines, center_time, sensitivity_definitions

__all__ = [
    "CenteredTime",
    "InterventionDefinition",
    "InterventionTimeline",
    "RolloutSeries",
    "TimelineSet",
    "awareness_month",
    "build_timelines",
    "center_time",
    "default_sensitivity_definitions",
    "format_month",
    "introduction_month",
    "onset_month",
    "parse_month",
    "read_rollout_csv",
    "sensitivity_definitions",
]
