"""ITS design matrix construction.

Column order is fixed: the ITS block ``(Intercept), year, intervention,
year_post``, the same four multiplied by ``exposed``, then one dummy per
non-reference level of each confounder field (first declared level is the
reference).
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from policy_its.cohort.dictionary import CONFOUNDER_FIELDS, DataDictionary
from policy_its.cohort.models import Observation
from policy_its.core.exceptions import DataValidationError
from policy_its.core.types import FloatArray, IntArray
from policy_its.intervention.timeline import TimelineSet
from policy_its.model.layout import FIXED_ITS_COLUMNS, LayoutManifest, dummy_column
from policy_its.model.params import ParameterSlices
from policy_its.model.priors import PriorSpec
from policy_its.validation.models import ValidationIssue

log = logging.getLogger(__name__)

N_ITS = 4


@dataclass(frozen=True)
class DesignRow:
    """One observation's view of the design."""

    its_block: tuple[float, ...]
    exposure_block: tuple[float, ...]
    confounder_block: tuple[float, ...]
    time_index: int
    area_index: int

    @property
    def fixed(self) -> FloatArray:
        return np.array(self.its_block + self.exposure_block + self.confounder_block, dtype=np.float64)


@dataclass
class Design:
    """Dense fixed-effect matrix plus time/area indices, outcomes and weights."""

    manifest: LayoutManifest
    X: FloatArray
    time_index: IntArray
    area_index: IntArray
    outcomes: FloatArray
    weights: FloatArray
    centered_year: IntArray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    exposed: IntArray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))

    @property
    def n(self) -> int:
        return int(self.X.shape[0])

    @property
    def slices(self) -> ParameterSlices:
        return ParameterSlices.from_manifest(self.manifest)

    @cached_property
    def latent_matrix(self) -> sp.csr_matrix:
        """A = [X, onehot(t), onehot(l)] so that mu = A @ latent."""
        rows = np.arange(self.n)
        ones = np.ones(self.n)
        time = sp.csr_matrix((ones, (rows, self.time_index)), shape=(self.n, self.manifest.n_time))
        area = sp.csr_matrix((ones, (rows, self.area_index)), shape=(self.n, self.manifest.n_area))
        return sp.hstack([sp.csr_matrix(self.X), time, area], format="csr")

    def row(self, i: int) -> DesignRow:
        x = self.X[i]
        return DesignRow(
            its_block=tuple(float(v) for v in x[:N_ITS]),
            exposure_block=tuple(float(v) for v in x[N_ITS : 2 * N_ITS]),
            confounder_block=tuple(float(v) for v in x[2 * N_ITS :]),
            time_index=int(self.time_index[i]),
            area_index=int(self.area_index[i]),
        )

    def with_weights(self, weights: FloatArray) -> Design:
        return Design(
            manifest=self.manifest,
            X=self.X,
            time_index=self.time_index,
            area_index=self.area_index,
            outcomes=self.outcomes,
            weights=np.asarray(weights, dtype=np.float64),
            centered_year=self.centered_year,
            exposed=self.exposed,
        )

    @classmethod
    def prior_only(cls, manifest: LayoutManifest) -> Design:
        """A design with no observations: the log-posterior is the log-prior."""
        return cls(
            manifest=manifest,
            X=np.zeros((0, manifest.n_fixed)),
            time_index=np.zeros(0, dtype=np.int64),
            area_index=np.zeros(0, dtype=np.int64),
            outcomes=np.zeros(0),
            weights=np.zeros(0),
        )


def confounder_columns(dictionary: DataDictionary) -> list[tuple[str, str]]:
    """(field, level) for every non-reference level, in column order."""
    return [(name, level) for name in CONFOUNDER_FIELDS for level in dictionary.levels(name)[1:]]


def build_manifest(
    dictionary: DataDictionary,
    time_years: Sequence[int],
    area_ids: Sequence[str],
    priors: PriorSpec | None = None,
    definition: str = "",
) -> LayoutManifest:
    levels = dictionary.level_sets()
    return LayoutManifest(
        columns=list(FIXED_ITS_COLUMNS) + [dummy_column(f, lv) for f, lv in confounder_columns(dictionary)],
        reference_levels={name: values[0] for name, values in levels.items()},
        level_sets=levels,
        time_years=list(time_years),
        area_ids=list(area_ids),
        priors=(priors or PriorSpec()).manifest_entry(),
        definition=definition,
    )


def build_design(
    observations: Sequence[Observation],
    timelines: TimelineSet,
    dictionary: DataDictionary,
    priors: PriorSpec | None = None,
) -> Design:
    """One design row per observation; offenders are listed in one error."""
    issues: list[ValidationIssue] = []
    missing_areas = sorted({o.area_id for o in observations if o.area_id not in timelines.timelines})
    issues.extend(ValidationIssue("area has no intervention timeline", field="area_id", value=a) for a in missing_areas)

    level_sets = dictionary.level_sets()
    bad_levels: set[tuple[str, str]] = set()
    for obs in observations:
        for name, value in obs.confounders.as_levels().items():
            if value not in level_sets[name]:
                bad_levels.add((name, value))
    issues.extend(ValidationIssue("undeclared level", field=name, value=value) for name, value in sorted(bad_levels))
    if issues:
        raise DataValidationError("Cannot build design", issues)

    time_years = sorted({o.year_index for o in observations})
    area_ids = sorted({o.area_id for o in observations})
    manifest = build_manifest(dictionary, time_years, area_ids, priors, timelines.definition.label)
    t_lookup = {y: i for i, y in enumerate(time_years)}
    l_lookup = {a: i for i, a in enumerate(area_ids)}
    dummies = confounder_columns(dictionary)

    n = len(observations)
    X = np.zeros((n, manifest.n_fixed))
    t_index = np.zeros(n, dtype=np.int64)
    l_index = np.zeros(n, dtype=np.int64)
    y = np.zeros(n)
    w = np.zeros(n)
    centered = np.zeros(n, dtype=np.int64)
    exposed = np.zeros(n, dtype=np.int64)

    for i, obs in enumerate(observations):
        ct = timelines.center(obs.area_id, obs.year_index)
        its = (1.0, float(ct.year), float(ct.intervention), float(ct.year_post))
        X[i, :N_ITS] = its
        X[i, N_ITS : 2 * N_ITS] = [obs.exposed * v for v in its]
        levels = obs.confounders.as_levels()
        X[i, 2 * N_ITS :] = [float(levels[name] == level) for name, level in dummies]
        t_index[i] = t_lookup[obs.year_index]
        l_index[i] = l_lookup[obs.area_id]
        y[i] = obs.outcome
        w[i] = obs.weight
        centered[i] = ct.year
        exposed[i] = obs.exposed

    log.info(
        "Design built: %d rows, %d fixed effects, %d years, %d areas",
        n,
        manifest.n_fixed,
        manifest.n_time,
        manifest.n_area,
    )
    return Design(
        manifest=manifest,
        X=X,
        time_index=t_index,
        area_index=l_index,
        outcomes=y,
        weights=w,
        centered_year=centered,
        exposed=exposed,
    )
