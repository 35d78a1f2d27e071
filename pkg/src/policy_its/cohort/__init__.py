"""Cohort ingestion and derivation of the analysis variables."""

from policy_its.cohort.build import build_cohort
from policy_its.cohort.dictionary import CONFOUNDER_FIELDS, DataDictionary
from policy_its.cohort.exposure import assign_age_band, derive_exposure
from policy_its.cohort.ghq import caseness_score, dichotomize_ghq
from policy_its.cohort.grouping import group_deprivation, group_ethnic_mix, rank_groups
from policy_its.cohort.ingest import read_areas_csv, read_cohort_csv
from policy_its.cohort.models import (
    AreaAttributes,
    CohortBuild,
    CohortSummary,
    ConfounderProfile,
    Observation,
    RawResponse,
    observations_frame,
)
from policy_its.cohort.summary import describe_cohort
from policy_its.cohort.weights import WeightAdjustment, adjust_weights

__all__ = [
    "CONFOUNDER_FIELDS",
    "AreaAttributes",
    "CohortBuild",
    "CohortSummary",
    "ConfounderProfile",
    "DataDictionary",
    "Observation",
    "RawResponse",
    "WeightAdjustment",
    "adjust_weights",
    "assign_age_band",
    "build_cohort",
    "caseness_score",
    "derive_exposure",
    "describe_cohort",
    "dichotomize_ghq",
    "group_deprivation",
    "group_ethnic_mix",
    "observations_frame",
    "rank_groups",
    "read_areas_csv",
    "read_cohort_csv",
]
