"""Declared level sets for every categorical variable.

The dictionary is fixed before fitting: the first declared level of each
categorical is its reference level in the design. A JSON copy ships in
``schema/data_dictionary.json``; ``DataDictionary.load(None)`` returns the
built-in default.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path

from pydantic import BaseModel, Field, ValidationError, model_validator

from policy_its.core.exceptions import ConfigError

log = logging.getLogger(__name__)

EMPLOYMENT_STATUSES: tuple[str, ...] = (
    "self employed",
    "employed full time",
    "employed part time",
    "unemployed",
    "retired",
    "maternity leave",
    "family care or home",
    "full-time student",
    "life-time sick or disabled",
    "government training scheme",
    "unpaid family business",
    "apprenticeship",
    "furlough",
    "something else",
)

INDIVIDUAL_FIELDS: tuple[str, ...] = ("age_band", "education", "ethnicity", "marital_status", "sex")
AREA_FIELDS: tuple[str, ...] = ("deprivation_decile", "ethnic_mix_quintile")
CONFOUNDER_FIELDS: tuple[str, ...] = INDIVIDUAL_FIELDS + AREA_FIELDS

N_DECILES = 10
N_QUINTILES = 5


class DataDictionary(BaseModel):
    """Level sets, study window and working-age bands for one dataset."""

    study_start: int = 2009
    study_end: int = 2021
    employment_statuses: list[str] = Field(default_factory=lambda: list(EMPLOYMENT_STATUSES))
    exposed_status: str = "unemployed"
    excluded_status: str = "life-time sick or disabled"
    age_band_edges: list[int] = Field(default_factory=lambda: [16, 25, 35, 45, 55, 65])
    education: list[str] = Field(
        default_factory=lambda: ["degree or higher", "gcse, a-level or equivalent", "below gcse and other"]
    )
    ethnicity: list[str] = Field(default_factory=lambda: ["white", "asian", "black", "mixed", "other"])
    marital_status: list[str] = Field(default_factory=lambda: ["married or civil partnership", "unmarried"])
    sex: list[str] = Field(default_factory=lambda: ["female", "male"])

    @model_validator(mode="after")
    def _check(self) -> DataDictionary:
        if self.study_start > self.study_end:
            raise ValueError("study_start must not exceed study_end")
        if len(self.employment_statuses) != len(set(self.employment_statuses)):
            raise ValueError("employment_statuses contains duplicates")
        for status in (self.exposed_status, self.excluded_status):
            if status not in self.employment_statuses:
                raise ValueError(f"{status!r} is not a declared employment status")
        edges = self.age_band_edges
        if len(edges) < 2 or any(b <= a for a, b in zip(edges, edges[1:])):
            raise ValueError("age_band_edges must be strictly increasing with at least two edges")
        for name in ("education", "ethnicity", "marital_status", "sex"):
            levels = getattr(self, name)
            if not levels or len(levels) != len(set(levels)):
                raise ValueError(f"{name} levels must be non-empty and unique")
        return self

    @property
    def study_years(self) -> list[int]:
        return list(range(self.study_start, self.study_end + 1))

    @property
    def age_bands(self) -> list[str]:
        edges = self.age_band_edges
        return [f"[{lo},{hi})" for lo, hi in zip(edges, edges[1:])]

    @property
    def working_age(self) -> tuple[int, int]:
        """Inclusive age range covered by the bands."""
        return self.age_band_edges[0], self.age_band_edges[-1] - 1

    def levels(self, field: str) -> list[str]:
        """Declared levels of a confounder field, reference level first."""
        if field == "age_band":
            return self.age_bands
        if field == "deprivation_decile":
            return [str(d) for d in range(1, N_DECILES + 1)]
        if field == "ethnic_mix_quintile":
            return [str(q) for q in range(1, N_QUINTILES + 1)]
        if field in ("education", "ethnicity", "marital_status", "sex"):
            return list(getattr(self, field))
        raise KeyError(f"Unknown confounder field {field!r}")

    def level_sets(self) -> dict[str, list[str]]:
        return {name: self.levels(name) for name in CONFOUNDER_FIELDS}

    @classmethod
    def load(cls, path: Path | None) -> DataDictionary:
        """Load a dictionary file, or the built-in default when *path* is None."""
        if path is None:
            return cls()
        if not path.is_file():
            raise ConfigError(f"Data dictionary not found: {path}")
        try:
            return cls.model_validate(json.loads(path.read_text(encoding="utf-8")))
        except (json.JSONDecodeError, ValidationError) as exc:
            raise ConfigError(f"Invalid data dictionary {path}: {exc}") from exc

    def dump(self, path: Path) -> Path:
        path.write_text(self.model_dump_json(indent=2) + "\n", encoding="utf-8")
        log.debug("Wrote data dictionary to %s", path)
        return path
