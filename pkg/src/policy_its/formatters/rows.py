"""Flatten effect summaries into table rows.

Intervals become ``<name>_median``, ``<name>_lower`` and ``<name>_upper``
columns; an absent interval becomes three ``None`` values so EMPTY cells keep
every column.
"""

from __future__ import annotations

from typing import Any

from policy_its.effects.models import STRATA, EffectSummary, Interval, TemporalRow

INTERVAL_FIELDS: tuple[str, ...] = ("prevalence_exposed", "prevalence_control", "ratio", "rho")


def interval_columns(name: str, interval: Interval | None) -> dict[str, float | None]:
    if interval is None:
        return {f"{name}_median": None, f"{name}_lower": None, f"{name}_upper": None}
    return {f"{name}_median": interval.median, f"{name}_lower": interval.lower, f"{name}_upper": interval.upper}


def effect_row(summary: EffectSummary, cell: dict[str, str] | None = None) -> dict[str, Any]:
    """One row for one cell; *cell* replaces the summary's own cell columns."""
    row: dict[str, Any] = dict(cell if cell is not None else summary.cell)
    row["status"] = summary.status.upper()
    row["reason"] = summary.reason
    for name in STRATA:
        row[f"n_{name}"] = summary.n_observations.get(name, 0)
    for name in INTERVAL_FIELDS:
        row.update(interval_columns(name, getattr(summary, name)))
    row["excluded_draws"] = summary.excluded_draws
    return row


def temporal_row(row: TemporalRow) -> dict[str, Any]:
    flat: dict[str, Any] = {
        "period": row.period,
        "year": row.year,
        "n_exposed": row.n_exposed,
        "n_control": row.n_control,
    }
    flat.update(interval_columns("prevalence_exposed", row.prevalence_exposed))
    flat.update(interval_columns("prevalence_control", row.prevalence_control))
    flat.update(interval_columns("ratio", row.ratio))
    return flat
