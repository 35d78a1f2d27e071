"""Exposure flag and working-age band derivation."""

from __future__ import annotations

from policy_its.cohort.dictionary import DataDictionary
from policy_its.core.exceptions import DataValidationError
from policy_its.validation.models import ValidationIssue

_DEFAULT_DICTIONARY = DataDictionary()


def derive_exposure(employment_status: str, dictionary: DataDictionary | None = None) -> int | None:
    """Map an employment status to the exposure flag.

    Returns 1 for the exposed status, 0 for every other declared status and
    ``None`` when the record must be excluded (life-time sick or disabled).
    """
    dictionary = dictionary or _DEFAULT_DICTIONARY
    if employment_status not in dictionary.employment_statuses:
        raise DataValidationError(
            "Unknown employment status",
            [ValidationIssue("not a declared employment status", field="employment_status", value=employment_status)],
        )
    if employment_status == dictionary.excluded_status:
        return None
    return int(employment_status == dictionary.exposed_status)


def assign_age_band(age: int, dictionary: DataDictionary | None = None) -> str | None:
    """Return the ``[lo,hi)`` band containing *age*, or None outside working age."""
    dictionary = dictionary or _DEFAULT_DICTIONARY
    edges = dictionary.age_band_edges
    for lo, hi, label in zip(edges, edges[1:], dictionary.age_bands):
        if lo <= age < hi:
            return label
    return None
