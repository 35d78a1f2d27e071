"""Turn ingested records into analysis observations with an exclusion ledger.

Exclusions are applied in a fixed order and every dropped record is counted
under exactly one reason::

    build = build_cohort(raw, areas, dictionary, config.cohort)
    assert build.report.is_balanced()
"""

from __future__ import annotations

import logging
from collections.abc import Sequence

from policy_its.cohort.dictionary import DataDictionary
from policy_its.cohort.exposure import assign_age_band, derive_exposure
from policy_its.cohort.ghq import dichotomize_ghq
from policy_its.cohort.grouping import group_deprivation, group_ethnic_mix
from policy_its.cohort.models import AreaAttributes, CohortBuild, ConfounderProfile, Observation, RawResponse
from policy_its.cohort.weights import adjust_weights
from policy_its.core.config import CohortConfig
from policy_its.validation.models import ExclusionReason, IssueSeverity, ValidationIssue, ValidationReport

log = logging.getLogger(__name__)


def build_cohort(
    raw: Sequence[RawResponse],
    areas: Sequence[AreaAttributes],
    dictionary: DataDictionary,
    config: CohortConfig | None = None,
    *,
    source: str = "cohort",
) -> CohortBuild:
    """Apply exclusions, derive outcome, exposure, profile and weight."""
    config = config or CohortConfig()
    report = ValidationReport(source=source, raw_records=len(raw))
    deprivation = group_deprivation(areas)
    ethnic_mix = group_ethnic_mix(areas)
    lo_year, hi_year = dictionary.study_start, dictionary.study_end

    kept: list[tuple[RawResponse, int, str]] = []
    for record in raw:
        if not lo_year <= record.interview_year <= hi_year:
            report.exclude(ExclusionReason.OUTSIDE_STUDY_WINDOW)
            continue
        exposed = derive_exposure(record.employment_status, dictionary)
        if exposed is None:
            report.exclude(ExclusionReason.LIFETIME_SICK)
            continue
        band = assign_age_band(record.age, dictionary)
        if band is None:
            report.exclude(ExclusionReason.OUTSIDE_WORKING_AGE)
            continue
        if record.area_id not in deprivation:
            report.exclude(ExclusionReason.UNKNOWN_AREA)
            continue
        kept.append((record, exposed, band))

    unknown_areas = sorted({r.area_id for r in raw if r.area_id not in deprivation})
    if unknown_areas:
        report.issues.append(
            ValidationIssue(
                f"{len(unknown_areas)} areas have no attributes",
                field="area_id",
                value=", ".join(unknown_areas[:5]),
                severity=IssueSeverity.WARNING,
            )
        )

    weights: dict[str, float] = {}
    if config.use_survey_weights:
        adjustment = adjust_weights(
            [record for record, _, _ in kept],
            config.response_covariates,
            dictionary=dictionary,
            floor=config.weight_floor,
        )
        weights = adjustment.weights
        report.flagged_weights = len(adjustment.flagged)
        survivors = []
        for record, exposed, band in kept:
            reason = adjustment.excluded.get(record.person_id)
            if reason is not None:
                report.exclude(reason)
            else:
                survivors.append((record, exposed, band))
        kept = survivors

    observations = [
        Observation(
            person_id=record.person_id,
            area_id=record.area_id,
            year_index=record.interview_year,
            outcome=dichotomize_ghq(record.ghq_items),  # type: ignore[arg-type]
            exposed=exposed,  # type: ignore[arg-type]
            confounders=ConfounderProfile(
                age_band=band,
                education=record.education,
                ethnicity=record.ethnicity,
                marital_status=record.marital_status,
                sex=record.sex,
                deprivation_decile=deprivation[record.area_id],
                ethnic_mix_quintile=ethnic_mix[record.area_id],
            ),
            weight=weights.get(record.person_id, 1.0),
            age=record.age,
        )
        for record, exposed, band in kept
    ]
    report.retained_records = len(observations)

    log.info(
        "Cohort built: %d of %d records retained, exclusions %s",
        report.retained_records,
        report.raw_records,
        dict(report.exclusions),
    )
    return CohortBuild(observations=observations, report=report, deprivation=deprivation, ethnic_mix=ethnic_mix)
