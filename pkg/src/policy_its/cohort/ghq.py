"""GHQ-12 caseness scoring."""

from __future__ import annotations

from collections.abc import Sequence

from policy_its.core.exceptions import DataValidationError
from policy_its.validation.models import ValidationIssue

GHQ_ITEM_COUNT = 12
GHQ_CASE_THRESHOLD = 4


def caseness_score(ghq_items: Sequence[int]) -> int:
    """Collapse each item (0,1 -> 0; 2,3 -> 1) and sum to a 0..12 score."""
    if len(ghq_items) != GHQ_ITEM_COUNT:
        raise DataValidationError(
            "GHQ-12 requires exactly 12 items",
            [ValidationIssue(f"expected {GHQ_ITEM_COUNT} items", field="ghq_items", value=str(len(ghq_items)))],
        )
    issues = [
        ValidationIssue("item must be an integer in 0..3", field=f"ghq_items[{index}]", value=str(item))
        for index, item in enumerate(ghq_items)
        if isinstance(item, bool) or not isinstance(item, int) or not 0 <= item <= 3
    ]
    if issues:
        raise DataValidationError("GHQ-12 item out of range", issues)
    return sum(1 for item in ghq_items if item >= 2)


def dichotomize_ghq(ghq_items: Sequence[int]) -> int:
    """Return 1 (psychological distress) when the caseness score is at least 4."""
    return int(caseness_score(ghq_items) >= GHQ_CASE_THRESHOLD)
