"""Report assembly: national trend, rho tables and plot data.

``build_report`` computes every table ``policy-its effects`` emits::

    report = build_report(fitted.latent_draws(), frame, config.effects)
    rows = report.area.cells
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any

from policy_its.core.config import EffectsConfig
from policy_its.core.types import FloatArray
from policy_its.effects.change import Adjustment, standardised_change
from policy_its.effects.frame import AnalysisFrame
from policy_its.effects.marginal import Aggregation, marginal_mu
from policy_its.effects.models import EffectSummary, Interval, ProfileQuery, TemporalRow
from policy_its.effects.summaries import exposed_control_ratio, prevalence, prevalence_draws
from policy_its.effects.sweep import SweepTable, profile_sweep, top_bottom_profiles

log = logging.getLogger(__name__)


# ── National trend ───────────────────────────────────────────────────


def _temporal_row(
    latent_draws: FloatArray,
    frame: AnalysisFrame,
    query: ProfileQuery,
    period: str,
    year: int | None,
    aggregation: Aggregation,
    level: float,
) -> TemporalRow:
    exposed = marginal_mu(latent_draws, frame, query.refine(exposed=1), aggregation=aggregation)
    control = marginal_mu(latent_draws, frame, query.refine(exposed=0), aggregation=aggregation)
    has_draws = latent_draws.shape[0] > 0
    row = TemporalRow(period=period, year=year, n_exposed=exposed.n_observations, n_control=control.n_observations)
    if has_draws and exposed.values is not None:
        row.prevalence_exposed = prevalence(exposed.values, level)
    if has_draws and control.values is not None:
        row.prevalence_control = prevalence(control.values, level)
    if has_draws and exposed.values is not None and control.values is not None:
        row.ratio = exposed_control_ratio(prevalence_draws(exposed.values), prevalence_draws(control.values), level)
    return row


def temporal_profile(
    latent_draws: FloatArray,
    frame: AnalysisFrame,
    *,
    aggregation: Aggregation = "linear_predictor",
    level: float = 0.95,
) -> list[TemporalRow]:
    """One row per centered year, then ``before``, ``after`` and ``all``."""
    rows = [
        _temporal_row(latent_draws, frame, ProfileQuery(years=(y, y)), f"year={y}", y, aggregation, level)
        for y in frame.centered_years()
    ]
    rows.append(_temporal_row(latent_draws, frame, ProfileQuery(period="before"), "before", None, aggregation, level))
    rows.append(_temporal_row(latent_draws, frame, ProfileQuery(period="after"), "after", None, aggregation, level))
    rows.append(_temporal_row(latent_draws, frame, ProfileQuery(), "all", None, aggregation, level))
    return rows


# ── Ad-hoc queries ───────────────────────────────────────────────────


@dataclass
class QueryResult:
    """One configured query: prevalence of its own selection and rho over its cell."""

    name: str
    query: ProfileQuery
    n_selected: int
    prevalence: Interval | None
    change: EffectSummary


def query_results(
    latent_draws: FloatArray,
    frame: AnalysisFrame,
    queries: dict[str, ProfileQuery],
    *,
    aggregation: Aggregation = "linear_predictor",
    adjustment: Adjustment = "multiplicative",
    level: float = 0.95,
) -> list[QueryResult]:
    """Evaluate named queries in configuration order.

    The prevalence honours every selector. The standardised change keeps the
    year, area and level selectors; its four strata set exposure and period.
    """
    results = []
    for name, query in queries.items():
        selection = marginal_mu(latent_draws, frame, query, aggregation=aggregation)
        interval = None
        if latent_draws.shape[0] > 0 and selection.values is not None:
            interval = prevalence(selection.values, level)
        change = standardised_change(
            latent_draws,
            frame,
            query.refine(exposed=None, period=None),
            cell={"query": name},
            aggregation=aggregation,
            adjustment=adjustment,
            level=level,
        )
        results.append(
            QueryResult(
                name=name, query=query, n_selected=selection.n_observations, prevalence=interval, change=change
            )
        )
    return results


# ── Full report ──────────────────────────────────────────────────────


@dataclass
class EffectsReport:
    """Every effects table of one fit."""

    national: EffectSummary
    temporal: list[TemporalRow]
    area: SweepTable
    confounders: list[SweepTable]
    joint: list[SweepTable]
    top: list[EffectSummary] = field(default_factory=list)
    bottom: list[EffectSummary] = field(default_factory=list)
    queries: list[QueryResult] = field(default_factory=list)
    settings: dict[str, Any] = field(default_factory=dict)

    def plot_data(self) -> dict[str, Any]:
        """Plain data for the national trend, area map, profile error bars, joint tiles and queries."""

        def interval(value: Interval | None) -> dict[str, float] | None:
            return value.model_dump() if value is not None else None

        return {
            "national_trend": [
                {
                    "period": r.period,
                    "year": r.year,
                    "prevalence_exposed": interval(r.prevalence_exposed),
                    "prevalence_control": interval(r.prevalence_control),
                }
                for r in self.temporal
                if r.year is not None
            ],
            "area_rho": [
                {"area_id": c.cell.get("area_id"), "status": c.status, "reason": c.reason, "rho": interval(c.rho)}
                for c in self.area.cells
            ],
            "profile_error_bars": [
                {"dimension": t.name, "level": c.cell[t.dimensions[0]], "status": c.status, "rho": interval(c.rho)}
                for t in self.confounders
                for c in t.cells
            ],
            "joint_tiles": [
                {
                    "dimensions": list(t.dimensions),
                    "levels": [c.cell[d] for d in t.dimensions],
                    "status": c.status,
                    "rho_median": c.rho.median if c.rho is not None else None,
                }
                for t in self.joint
                for c in t.cells
            ],
            "queries": [
                {
                    "name": q.name,
                    "description": q.query.describe(),
                    "prevalence": interval(q.prevalence),
                    "status": q.change.status,
                    "rho": interval(q.change.rho),
                }
                for q in self.queries
            ],
        }


def build_report(latent_draws: FloatArray, frame: AnalysisFrame, config: EffectsConfig | None = None) -> EffectsReport:
    """National rho and trend, per-area, per-confounder and joint sweeps, top/bottom profiles, queries."""
    config = config or EffectsConfig()
    options: dict[str, Any] = {
        "aggregation": config.aggregation,
        "adjustment": config.adjustment,
        "level": config.credible_level,
    }
    aggregation: Aggregation = config.aggregation
    adjustment: Adjustment = config.adjustment

    national = standardised_change(
        latent_draws,
        frame,
        aggregation=aggregation,
        adjustment=adjustment,
        level=config.credible_level,
    )
    temporal = temporal_profile(latent_draws, frame, aggregation=aggregation, level=config.credible_level)
    area = profile_sweep(latent_draws, frame, ["area_id"], **options)
    dimensions = list(config.individual_dimensions) + list(config.community_dimensions)
    confounders = [profile_sweep(latent_draws, frame, [d], **options) for d in dimensions]
    joint = [
        profile_sweep(latent_draws, frame, [community, individual], **options)
        for community in config.community_dimensions
        for individual in config.individual_dimensions
    ]
    profiles = profile_sweep(latent_draws, frame, list(config.individual_dimensions), **options)
    top, bottom = top_bottom_profiles(profiles, config.top_k)
    queries = query_results(latent_draws, frame, config.queries, **options)
    log.info(
        "Effects report: national rho %s, %d empty areas",
        f"{national.rho.median:.4f}" if national.rho is not None else "EMPTY",
        len(area.empty()),
    )
    return EffectsReport(
        national=national,
        temporal=temporal,
        area=area,
        confounders=confounders,
        joint=joint,
        top=top,
        bottom=bottom,
        queries=queries,
        settings={**options, "percentile_method": "linear"},
    )
