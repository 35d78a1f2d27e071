"""Descriptive statistics of an analysis sample."""

from __future__ import annotations

from collections.abc import Sequence

from policy_its.cohort.models import CohortSummary, Observation


def describe_cohort(
    observations: Sequence[Observation],
    *,
    female_level: str = "female",
    white_level: str = "white",
) -> CohortSummary:
    """Counts and unweighted percentages over person-year observations.

    ``pct_ever_exposed`` is per person: the share of persons exposed in at
    least one of their years.
    """
    n = len(observations)
    persons = {o.person_id for o in observations}
    ever_exposed = {o.person_id for o in observations if o.exposed == 1}
    ages = [o.age for o in observations if o.age is not None]

    def pct(count: int, total: int) -> float:
        return 100.0 * count / total if total else 0.0

    return CohortSummary(
        n_observations=n,
        n_persons=len(persons),
        n_areas=len({o.area_id for o in observations}),
        mean_age=sum(ages) / len(ages) if ages else None,
        pct_female=pct(sum(o.confounders.sex == female_level for o in observations), n),
        pct_non_white=pct(sum(o.confounders.ethnicity != white_level for o in observations), n),
        pct_ever_exposed=pct(len(ever_exposed), len(persons)),
        outcome_prevalence=sum(o.outcome for o in observations) / n if n else 0.0,
    )
