"""Validation data models: row-level issues, exclusion ledger and reports."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum


class IssueSeverity(str, Enum):
    """Severity of a validation issue."""

    ERROR = "error"
    WARNING = "warning"
    INFO = "info"


class ExclusionReason(str, Enum):
    """Why a raw record did not become an Observation."""

    LIFETIME_SICK = "lifetime_sick_or_disabled"
    OUTSIDE_WORKING_AGE = "outside_working_age"
    OUTSIDE_STUDY_WINDOW = "outside_study_window"
    UNKNOWN_AREA = "area_without_attributes"
    ABSENT_AT_WAVE_ONE = "absent_at_wave_one"
    MISSING_BASE_WEIGHT = "missing_base_weight"


@dataclass(frozen=True)
class ValidationIssue:
    """A single problem found in an input file or record."""

    message: str
    row: int | None = None
    field: str = ""
    value: str = ""
    severity: IssueSeverity = IssueSeverity.ERROR

    def describe(self) -> str:
        where = f"row {self.row}" if self.row is not None else "record"
        col = f" [{self.field}]" if self.field else ""
        val = f" (got {self.value!r})" if self.value else ""
        return f"{where}{col}: {self.message}{val}"


@dataclass
class ValidationReport:
    """Issues plus the exclusion ledger for one cohort build."""

    source: str
    raw_records: int = 0
    retained_records: int = 0
    issues: list[ValidationIssue] = field(default_factory=list)
    exclusions: Counter[str] = field(default_factory=Counter)
    flagged_weights: int = 0

    def exclude(self, reason: ExclusionReason, count: int = 1) -> None:
        self.exclusions[reason.value] += count

    @property
    def excluded_records(self) -> int:
        return sum(self.exclusions.values())

    def is_balanced(self) -> bool:
        """Exclusion counts must account for every dropped record."""
        return self.excluded_records == self.raw_records - self.retained_records

    def has_errors(self) -> bool:
        return any(i.severity == IssueSeverity.ERROR for i in self.issues)

    def as_dict(self) -> dict[str, object]:
        return {
            "source": self.source,
            "raw_records": self.raw_records,
            "retained_records": self.retained_records,
            "excluded_records": self.excluded_records,
            "exclusions": dict(sorted(self.exclusions.items())),
            "flagged_weights": self.flagged_weights,
            "warnings": [i.describe() for i in self.issues if i.severity != IssueSeverity.ERROR],
        }
