"""Validation models shared by the ingestion modules."""

from __future__ import annotations

from policy_its.validation.models import (
    ExclusionReason,
    IssueSeverity,
    ValidationIssue,
    ValidationReport,
)

__all__ = ["ExclusionReason", "IssueSeverity", "ValidationIssue", "ValidationReport"]
