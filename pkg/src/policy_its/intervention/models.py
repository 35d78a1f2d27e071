"""Pydantic data models for rollout series and intervention timing."""

from __future__ import annotations

from datetime import date
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator


class InterventionDefinition(BaseModel):
    """How an area's intervention onset is derived from its rollout series.

    ``awareness`` needs ``pct`` in (0, 100]; ``introduction`` takes none.
    Config files may spell the kind as ``type``.
    """

    model_config = ConfigDict(frozen=True)

    kind: Literal["awareness", "introduction"] = "awareness"
    pct: float | None = Field(default=None, gt=0.0, le=100.0)

    @model_validator(mode="before")
    @classmethod
    def _accept_type_key(cls, data: Any) -> Any:
        if isinstance(data, dict) and "type" in data and "kind" not in data:
            data = {("kind" if k == "type" else k): v for k, v in data.items()}
        return data

    @model_validator(mode="after")
    def _check_pct(self) -> InterventionDefinition:
        if self.kind == "awareness" and self.pct is None:
            raise ValueError("awareness definitions need pct")
        if self.kind == "introduction" and self.pct is not None:
            raise ValueError("introduction definitions take no pct")
        return self

    @property
    def label(self) -> str:
        if self.kind == "introduction":
            return "introduction"
        return f"awareness_{self.pct:g}"


def default_sensitivity_definitions() -> list[InterventionDefinition]:
    """Introduction plus awareness at 5, 15, 25, 35 and 45 %."""
    return [InterventionDefinition(kind="introduction")] + [
        InterventionDefinition(kind="awareness", pct=pct) for pct in (5.0, 15.0, 25.0, 35.0, 45.0)
    ]


class RolloutSeries(BaseModel):
    """Monthly recipient counts for one area; months are first-of-month dates."""

    model_config = ConfigDict(frozen=True)

    area_id: str
    months: tuple[date, ...]
    counts: tuple[int, ...]

    @model_validator(mode="after")
    def _check(self) -> RolloutSeries:
        if len(self.months) != len(self.counts):
            raise ValueError("months and counts must have equal length")
        if any(b <= a for a, b in zip(self.months, self.months[1:])):
            raise ValueError("months must be strictly increasing")
        if any(c < 0 for c in self.counts):
            raise ValueError("counts must be non-negative")
        return self

    @property
    def final_count(self) -> int:
        return self.counts[-1] if self.counts else 0


class InterventionTimeline(BaseModel):
    """Awareness year of one area under one definition; None means never aware."""

    model_config = ConfigDict(frozen=True)

    area_id: str
    awareness_year: int | None
    definition: InterventionDefinition

    @property
    def never(self) -> bool:
        return self.awareness_year is None


class CenteredTime(BaseModel):
    """Centered year, step indicator and post-intervention slope counter."""

    model_config = ConfigDict(frozen=True)

    year: int
    intervention: Literal[0, 1]
    year_post: int = Field(ge=0)

    @model_validator(mode="after")
    def _check(self) -> CenteredTime:
        if self.intervention != int(self.year >= 0):
            raise ValueError("intervention must equal 1{year >= 0}")
        if self.year_post != max(self.year, 0):
            raise ValueError("year_post must equal max(year, 0)")
        return self
