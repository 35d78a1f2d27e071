"""Layout manifest: what every coefficient and index means.

The manifest is emitted as JSON next to every fit and embedded in the fit
artifact, so coefficient positions never need to be inferred.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field

ITS_COLUMNS: tuple[str, ...] = ("(Intercept)", "year", "intervention", "year_post")
EXPOSURE_COLUMNS: tuple[str, ...] = ("exposed", "exposed:year", "exposed:intervention", "exposed:year_post")
FIXED_ITS_COLUMNS: tuple[str, ...] = ITS_COLUMNS + EXPOSURE_COLUMNS

HYPER_NAMES: tuple[str, ...] = ("log_sigma_gamma", "log_sigma_delta")


def dummy_column(field: str, level: str) -> str:
    return f"{field}[{level}]"


class LayoutManifest(BaseModel):
    """Column names, reference levels and index maps of one design."""

    model_config = ConfigDict(frozen=True)

    columns: list[str]
    reference_levels: dict[str, str]
    level_sets: dict[str, list[str]]
    time_years: list[int] = Field(description="t -> calendar year")
    area_ids: list[str] = Field(description="l -> area_id")
    priors: dict[str, object] = Field(default_factory=dict)
    definition: str = ""

    @property
    def n_fixed(self) -> int:
        return len(self.columns)

    @property
    def n_time(self) -> int:
        return len(self.time_years)

    @property
    def n_area(self) -> int:
        return len(self.area_ids)

    @property
    def n_latent(self) -> int:
        return self.n_fixed + self.n_time + self.n_area

    @property
    def n_params(self) -> int:
        return self.n_latent + len(HYPER_NAMES)

    def parameter_names(self) -> list[str]:
        """Names in vector order: beta, gamma, delta, log sigmas."""
        return (
            list(self.columns)
            + [f"gamma[{y}]" for y in self.time_years]
            + [f"delta[{a}]" for a in self.area_ids]
            + list(HYPER_NAMES)
        )

    def column_index(self, name: str) -> int:
        return self.columns.index(name)

    def to_json(self) -> str:
        return self.model_dump_json(indent=2)

    def digest(self) -> str:
        """Short sha256 of the canonical manifest, used as its reference in outputs."""
        canonical = json.dumps(self.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]

    def dump(self, path: Path) -> Path:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_json() + "\n", encoding="utf-8")
        return path

    @classmethod
    def load(cls, path: Path) -> LayoutManifest:
        return cls.model_validate_json(path.read_text(encoding="utf-8"))
