"""Rank-based area groupings: IMD deciles and ethnic-mix quintiles."""

from __future__ import annotations

import math
from collections.abc import Sequence

from policy_its.cohort.dictionary import N_DECILES, N_QUINTILES
from policy_its.cohort.models import AreaAttributes
from policy_its.core.exceptions import DataValidationError
from policy_its.core.types import AreaGrouping
from policy_its.validation.models import ValidationIssue


def rank_groups(area_ids: Sequence[str], scores: Sequence[float], n_groups: int) -> AreaGrouping:
    """Split areas into *n_groups* equal-count groups, highest score in group 1.

    Ties keep input order. Group sizes differ by at most one.
    """
    n = len(area_ids)
    if n < n_groups:
        raise DataValidationError(
            f"Cannot form {n_groups} groups from {n} areas",
            [ValidationIssue(f"need at least {n_groups} areas", field="area_id", value=str(n))],
        )
    bad = [
        ValidationIssue("score must be finite", field="score", value=f"{area_id}={score}")
        for area_id, score in zip(area_ids, scores)
        if not math.isfinite(score)
    ]
    if bad:
        raise DataValidationError("Non-finite area scores", bad)

    order = sorted(range(n), key=lambda i: -scores[i])
    return {area_ids[i]: rank * n_groups // n + 1 for rank, i in enumerate(order)}


def group_deprivation(areas: Sequence[AreaAttributes]) -> AreaGrouping:
    """IMD deciles: 1 = most deprived (highest score), 10 = least deprived."""
    return rank_groups([a.area_id for a in areas], [a.imd_score for a in areas], N_DECILES)


def group_ethnic_mix(areas: Sequence[AreaAttributes]) -> AreaGrouping:
    """Ethnic-mix quintiles: 1 = most ethnically mixed, 5 = least."""
    return rank_groups(
        [a.area_id for a in areas],
        [a.ethnic_minority_proportion for a in areas],
        N_QUINTILES,
    )
