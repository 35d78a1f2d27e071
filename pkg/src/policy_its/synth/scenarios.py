"""Synthetic scenario configuration and the shipped scenario library.

A scenario fixes everything the generator needs: panel size, study years,
true coefficients, random-effect scales, rollout shape and the response
mechanism. Scenarios are plain pydantic models so they load from a run
config's ``synth.overrides`` block::

    scenario = scenario_library(seed=7)["PAPER-LIKE"].with_overrides({"n_areas": 12})
"""

from __future__ import annotations

import math
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from policy_its.cohort.dictionary import N_DECILES, DataDictionary
from policy_its.core.exceptions import ConfigError
from policy_its.model.layout import FIXED_ITS_COLUMNS


def _logit(p: float) -> float:
    return math.log(p / (1.0 - p))


class ScenarioConfig(BaseModel):
    """Known-truth description of one synthetic dataset.

    ``beta`` is keyed by ITS column name (missing columns are zero);
    ``confounder_effects`` and ``response_effects`` are keyed by dummy
    column, e.g. ``sex[male]``. ``awareness_years`` pins each area's
    awareness year (None = never aware); otherwise years are drawn from
    ``adoption_years`` and ``never_fraction``.
    """

    model_config = ConfigDict(frozen=True)

    name: str = "custom"
    seed: int
    n_areas: int = Field(default=30, ge=N_DECILES)
    n_persons_per_area: int = Field(default=60, gt=0)
    study_start: int = 2012
    n_years: int = Field(default=10, gt=0)

    beta: dict[str, float] = Field(default_factory=dict)
    confounder_effects: dict[str, float] = Field(default_factory=dict)
    sigma_gamma: float = Field(default=0.0, ge=0.0)
    sigma_delta: float = Field(default=0.0, ge=0.0)
    effect_heterogeneity: float = Field(default=0.0, ge=0.0)

    awareness_years: list[int | None] | None = None
    adoption_years: tuple[int, int] | None = None
    never_fraction: float = Field(default=0.0, ge=0.0, lt=1.0)
    threshold_pct: float = Field(default=25.0, gt=0.0, le=100.0)
    ramp_months: int = Field(default=24, ge=1)
    instant_adoption: bool = False

    exposure_rate: float = Field(default=0.1, gt=0.0, lt=1.0)
    lifetime_sick_rate: float = Field(default=0.0, ge=0.0, lt=1.0)
    category_frequencies: dict[str, list[float]] = Field(default_factory=dict)
    response_intercept: float = 3.0
    response_effects: dict[str, float] = Field(default_factory=dict)
    base_weight_sd: float = Field(default=0.0, ge=0.0)

    @field_validator("beta")
    @classmethod
    def _known_columns(cls, value: dict[str, float]) -> dict[str, float]:
        unknown = sorted(set(value) - set(FIXED_ITS_COLUMNS))
        if unknown:
            raise ValueError(f"unknown ITS columns {unknown}; expected names from {list(FIXED_ITS_COLUMNS)}")
        return value

    @field_validator("category_frequencies")
    @classmethod
    def _frequencies(cls, value: dict[str, list[float]]) -> dict[str, list[float]]:
        for name, freqs in value.items():
            if not freqs or any(f < 0 for f in freqs) or sum(freqs) <= 0:
                raise ValueError(f"category_frequencies[{name!r}] must be non-negative with a positive sum")
        return value

    @model_validator(mode="after")
    def _check_areas(self) -> ScenarioConfig:
        if self.awareness_years is not None and len(self.awareness_years) != self.n_areas:
            raise ValueError("awareness_years needs one entry per area")
        if self.adoption_years is not None and self.adoption_years[0] > self.adoption_years[1]:
            raise ValueError("adoption_years must be ordered")
        return self

    @property
    def study_end(self) -> int:
        return self.study_start + self.n_years - 1

    @property
    def study_years(self) -> list[int]:
        return list(range(self.study_start, self.study_end + 1))

    @property
    def window(self) -> tuple[int, int]:
        return self.study_start, self.study_end

    @property
    def adoption_window(self) -> tuple[int, int]:
        """Years awareness is drawn from when not pinned per area."""
        if self.adoption_years is not None:
            return self.adoption_years
        return self.study_start + self.n_years // 3, max(self.study_end - 1, self.study_start + self.n_years // 3)

    def coefficient(self, column: str) -> float:
        return float(self.beta.get(column, 0.0))

    def beta_vector(self) -> list[float]:
        return [self.coefficient(c) for c in FIXED_ITS_COLUMNS]

    def fits_window(self, dictionary: DataDictionary) -> bool:
        return dictionary.study_start <= self.study_start and self.study_end <= dictionary.study_end

    def with_overrides(self, overrides: dict[str, Any]) -> ScenarioConfig:
        if not overrides:
            return self
        try:
            return ScenarioConfig.model_validate({**self.model_dump(), **overrides})
        except ValidationError as exc:
            raise ConfigError(f"Invalid scenario overrides for {self.name}: {exc}") from exc


def scenario_library(seed: int) -> dict[str, ScenarioConfig]:
    """NULL, PAPER-LIKE and HETEROGENEOUS at desk scale (30 areas x 60 persons x 10 years).

    PAPER-LIKE is calibrated so the national standardised change is near
    0.15; it is a calibration target, not a replication.
    """
    baseline = {"(Intercept)": _logit(0.15), "exposed": 1.2}
    confounders = {
        "sex[male]": -0.2,
        "education[below gcse and other]": 0.3,
        "marital_status[unmarried]": 0.15,
    }
    return {
        "NULL": ScenarioConfig(
            name="NULL",
            seed=seed,
            beta=baseline,
            confounder_effects=confounders,
            sigma_gamma=0.1,
            sigma_delta=0.2,
        ),
        "PAPER-LIKE": ScenarioConfig(
            name="PAPER-LIKE",
            seed=seed,
            beta={**baseline, "exposed:intervention": 0.25},
            confounder_effects=confounders,
            sigma_gamma=0.1,
            sigma_delta=0.2,
        ),
        "HETEROGENEOUS": ScenarioConfig(
            name="HETEROGENEOUS",
            seed=seed,
            beta={**baseline, "exposed:intervention": 0.25},
            confounder_effects=confounders,
            sigma_gamma=0.1,
            sigma_delta=0.4,
            effect_heterogeneity=0.5,
        ),
    }


def get_scenario(name: str, seed: int, overrides: dict[str, Any] | None = None) -> ScenarioConfig:
    library = scenario_library(seed)
    if name not in library:
        raise ConfigError(f"Unknown scenario {name!r}; choose from {sorted(library)}")
    return library[name].with_overrides(overrides or {})
