"""Pydantic data models for cohort ingestion and derivation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, field_validator

from policy_its.validation.models import ValidationReport

# ── Raw inputs ───────────────────────────────────────────────────────


class RawResponse(BaseModel):
    """One person-year survey record as ingested.

    ``base_weight`` (wave-1 cross-sectional weight) and ``wave_responses``
    (one flag per wave, wave 1 first) are person-level and repeated on every
    row of the person.
    """

    model_config = ConfigDict(frozen=True)

    person_id: str
    area_id: str
    interview_year: int
    ghq_items: tuple[int, ...]
    employment_status: str
    age: int
    education: str
    ethnicity: str
    marital_status: str
    sex: str
    base_weight: float | None = Field(default=None, ge=0.0)
    wave_responses: tuple[bool, ...] = ()

    @property
    def responded_wave_one(self) -> bool:
        return bool(self.wave_responses) and self.wave_responses[0]

    @property
    def responded_all_subsequent(self) -> bool:
        return all(self.wave_responses[1:])


class AreaAttributes(BaseModel):
    """Area-level attributes used for the community confounders."""

    model_config = ConfigDict(frozen=True)

    area_id: str
    imd_score: float
    ethnic_minority_proportion: float = Field(ge=0.0, le=1.0)

    @field_validator("imd_score")
    @classmethod
    def _finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("imd_score must be finite")
        return value


# ── Derived analysis records ─────────────────────────────────────────


class ConfounderProfile(BaseModel):
    """Individual- and area-level confounder categories of one observation."""

    model_config = ConfigDict(frozen=True)

    age_band: str
    education: str
    ethnicity: str
    marital_status: str
    sex: str
    deprivation_decile: int = Field(ge=1, le=10)
    ethnic_mix_quintile: int = Field(ge=1, le=5)

    def as_levels(self) -> dict[str, str]:
        """Field -> level string, in the same form the data dictionary declares."""
        return {
            "age_band": self.age_band,
            "education": self.education,
            "ethnicity": self.ethnicity,
            "marital_status": self.marital_status,
            "sex": self.sex,
            "deprivation_decile": str(self.deprivation_decile),
            "ethnic_mix_quintile": str(self.ethnic_mix_quintile),
        }


class Observation(BaseModel):
    """One retained person-year: outcome, exposure, profile, area, year, weight."""

    model_config = ConfigDict(frozen=True)

    person_id: str
    area_id: str
    year_index: int
    outcome: Literal[0, 1]
    exposed: Literal[0, 1]
    confounders: ConfounderProfile
    weight: float = Field(gt=0.0)
    age: int | None = None


class CohortSummary(BaseModel):
    """Descriptive statistics of the analysis sample."""

    n_observations: int
    n_persons: int
    n_areas: int
    mean_age: float | None
    pct_female: float
    pct_non_white: float
    pct_ever_exposed: float
    outcome_prevalence: float


@dataclass
class CohortBuild:
    """Retained observations plus the exclusion ledger."""

    observations: list[Observation]
    report: ValidationReport
    deprivation: dict[str, int] = field(default_factory=dict)
    ethnic_mix: dict[str, int] = field(default_factory=dict)

    def to_frame(self) -> pd.DataFrame:
        return observations_frame(self.observations)


def observations_frame(observations: list[Observation]) -> pd.DataFrame:
    """Flatten observations to one row each, confounder levels as strings."""
    rows = []
    for obs in observations:
        row: dict[str, object] = {
            "person_id": obs.person_id,
            "area_id": obs.area_id,
            "year_index": obs.year_index,
            "outcome": obs.outcome,
            "exposed": obs.exposed,
            "weight": obs.weight,
            "age": obs.age,
        }
        row.update(obs.confounders.as_levels())
        rows.append(row)
    columns = [
        "person_id", "area_id", "year_index", "outcome", "exposed", "weight", "age",
        "age_band", "education", "ethnicity", "marital_status", "sex",
        "deprivation_decile", "ethnic_mix_quintile",
    ]
    return pd.DataFrame(rows, columns=columns)
