"""Pydantic data models for effect summaries; ``ProfileQuery`` is re-exported from core."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

from policy_its.core.query import ProfileQuery as ProfileQuery

STRATA: tuple[str, ...] = ("exposed_after", "exposed_before", "control_after", "control_before")


class Interval(BaseModel):
    """Posterior median with an equal-tailed credible interval."""

    model_config = ConfigDict(frozen=True)

    median: float
    lower: float
    upper: float

    @model_validator(mode="after")
    def _ordered(self) -> Interval:
        if not self.lower <= self.median <= self.upper:
            raise ValueError("interval must satisfy lower <= median <= upper")
        return self

    def contains(self, value: float) -> bool:
        return self.lower <= value <= self.upper


class EffectSummary(BaseModel):
    """One cell: after-period prevalences, their ratio and the standardised change.

    An EMPTY cell keeps its counts and names the missing stratum in
    ``reason``; its interval fields are None.
    """

    cell: dict[str, str] = Field(default_factory=dict)
    status: Literal["ok", "empty"] = "ok"
    reason: str | None = None
    prevalence_exposed: Interval | None = None
    prevalence_control: Interval | None = None
    ratio: Interval | None = None
    rho: Interval | None = None
    n_observations: dict[str, int] = Field(default_factory=dict)
    excluded_draws: int = 0

    @property
    def is_empty(self) -> bool:
        return self.status == "empty"

    @property
    def label(self) -> str:
        return ", ".join(f"{k}={v}" for k, v in self.cell.items()) or "national"


class TemporalRow(BaseModel):
    """Exposed and control prevalence for one period of the national trend."""

    period: str
    year: int | None = None
    n_exposed: int
    n_control: int
    prevalence_exposed: Interval | None = None
    prevalence_control: Interval | None = None
    ratio: Interval | None = None
