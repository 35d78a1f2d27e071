"""Profile query: the selectors that pick a subset of analysis rows.

Lives in ``core`` so run configuration can carry named queries without
importing the effects package.
"""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator


class ProfileQuery(BaseModel):
    """Stratum selectors; unset selectors do not constrain.

    ``years`` is an inclusive centered-year range. ``levels`` constrains
    confounder fields (and ``area_id``) to one level each.
    """

    model_config = ConfigDict(frozen=True)

    years: tuple[int, int] | None = None
    period: Literal["before", "after"] | None = None
    areas: tuple[str, ...] | None = None
    exposed: Literal[0, 1] | None = None
    levels: dict[str, str] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check_years(self) -> ProfileQuery:
        if self.years is not None and self.years[0] > self.years[1]:
            raise ValueError("years range must be ordered")
        return self

    def refine(self, **update: object) -> ProfileQuery:
        return self.model_copy(update=update)

    def describe(self) -> str:
        parts = []
        if self.exposed is not None:
            parts.append("exposed" if self.exposed else "control")
        if self.period is not None:
            parts.append(self.period)
        if self.years is not None:
            parts.append(f"year {self.years[0]}..{self.years[1]}")
        if self.areas is not None:
            parts.append(f"areas {','.join(self.areas)}")
        parts.extend(f"{k}={v}" for k, v in sorted(self.levels.items()))
        return " & ".join(parts) or "all"
