"""Posterior effect summaries: prevalences, ratios and the standardised change rho."""

from policy_its.effects.change import rho_draws, standardised_change
from policy_its.effects.frame import AnalysisFrame
from policy_its.effects.marginal import StratumMu, marginal_mu
from policy_its.effects.models import EffectSummary, Interval, ProfileQuery, TemporalRow
from policy_its.effects.report import EffectsReport, QueryResult, build_report, query_results, temporal_profile
from policy_its.effects.summaries import exposed_control_ratio, prevalence, summarize
from policy_its.effects.sweep import SweepTable, profile_sweep, top_bottom_profiles

__all__ = [
    "AnalysisFrame",
    "EffectSummary",
    "EffectsReport",
    "Interval",
    "ProfileQuery",
    "QueryResult",
    "StratumMu",
    "SweepTable",
    "TemporalRow",
    "build_report",
    "exposed_control_ratio",
    "marginal_mu",
    "prevalence",
    "profile_sweep",
    "query_results",
    "rho_draws",
    "standardised_change",
    "summarize",
    "temporal_profile",
    "top_bottom_profiles",
]
