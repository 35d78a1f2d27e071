"""Observation table aligned with the design rows, for resolving queries."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import pandas as pd
import scipy.sparse as sp

from policy_its.cohort.dictionary import CONFOUNDER_FIELDS
from policy_its.cohort.models import Observation, observations_frame
from policy_its.core.exceptions import ArtifactError
from policy_its.core.types import BoolArray, FloatArray
from policy_its.effects.models import ProfileQuery
from policy_its.model.design import Design
from policy_its.model.layout import LayoutManifest

SELECTABLE_FIELDS: tuple[str, ...] = CONFOUNDER_FIELDS + ("area_id",)


@dataclass
class AnalysisFrame:
    """One row per design row: area, centered year, period, exposure, weight, levels."""

    table: pd.DataFrame
    latent_matrix: sp.csr_matrix
    manifest: LayoutManifest

    @classmethod
    def from_design(cls, design: Design, observations: Sequence[Observation]) -> AnalysisFrame:
        if len(observations) != design.n:
            raise ArtifactError("Observations and design rows differ in number")
        table = observations_frame(list(observations))
        table["centered_year"] = design.centered_year
        table["period"] = np.where(design.centered_year >= 0, "after", "before")
        table["weight"] = design.weights
        return cls(table=table, latent_matrix=design.latent_matrix, manifest=design.manifest)

    @property
    def n(self) -> int:
        return len(self.table)

    @property
    def weights(self) -> FloatArray:
        return self.table["weight"].to_numpy(dtype=np.float64)

    def levels(self, field: str) -> list[str]:
        """Declared levels of a field in declaration order; areas in index order."""
        if field == "area_id":
            return list(self.manifest.area_ids)
        if field not in self.manifest.level_sets:
            raise KeyError(f"Unknown profile dimension {field!r}")
        return list(self.manifest.level_sets[field])

    def centered_years(self) -> list[int]:
        return sorted(int(y) for y in self.table["centered_year"].unique())

    def mask(self, query: ProfileQuery) -> BoolArray:
        t = self.table
        keep = np.ones(len(t), dtype=bool)
        if query.exposed is not None:
            keep &= t["exposed"].to_numpy() == query.exposed
        if query.period is not None:
            keep &= t["period"].to_numpy() == query.period
        if query.years is not None:
            years = t["centered_year"].to_numpy()
            keep &= (years >= query.years[0]) & (years <= query.years[1])
        if query.areas is not None:
            keep &= t["area_id"].isin(query.areas).to_numpy()
        for field, level in query.levels.items():
            if field not in SELECTABLE_FIELDS:
                raise KeyError(f"Unknown profile dimension {field!r}")
            keep &= t[field].astype(str).to_numpy() == level
        return keep

    def count(self, query: ProfileQuery) -> int:
        return int(self.mask(query).sum())
