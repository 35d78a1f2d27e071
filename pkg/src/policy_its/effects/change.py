"""Standardised change of exposed prevalence after vs. before the intervention.

Per draw, with stratum-average linear predictors mu_EA, mu_EB, mu_CA, mu_CB
(exposed/control, after/before)::

    p_EA  = expit(mu_EA)
    p~_EB = expit(mu_EB * mu_CA / mu_CB)        multiplicative (default)
    p~_EB = expit(mu_EB + mu_CA - mu_CB)        additive
    rho   = (p_EA - p~_EB) / p~_EB

Draws with mu_CB == 0 (multiplicative) or a non-finite rho are excluded and
counted.
"""

from __future__ import annotations

import logging
from typing import Literal

import numpy as np
from scipy.special import expit

from policy_its.core.types import FloatArray
from policy_its.effects.frame import AnalysisFrame
from policy_its.effects.marginal import Aggregation, StratumMu, marginal_mu
from policy_its.effects.models import STRATA, EffectSummary, ProfileQuery
from policy_its.effects.summaries import exposed_control_ratio, prevalence, prevalence_draws, summarize

log = logging.getLogger(__name__)

Adjustment = Literal["multiplicative", "additive"]


def rho_draws(
    mu_ea: FloatArray,
    mu_eb: FloatArray,
    mu_ca: FloatArray,
    mu_cb: FloatArray,
    adjustment: Adjustment = "multiplicative",
) -> tuple[FloatArray, int]:
    """Per-draw rho and the number of excluded draws (NaN in the returned array)."""
    mu_ea, mu_eb, mu_ca, mu_cb = (np.asarray(a, dtype=np.float64) for a in (mu_ea, mu_eb, mu_ca, mu_cb))
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if adjustment == "multiplicative":
            adjusted = np.where(mu_cb != 0.0, mu_eb * mu_ca / np.where(mu_cb != 0.0, mu_cb, 1.0), np.nan)
        else:
            adjusted = mu_eb + mu_ca - mu_cb
        p_eb = expit(adjusted)
        rho = (expit(mu_ea) - p_eb) / p_eb
    bad = ~np.isfinite(rho)
    rho[bad] = np.nan
    return rho, int(bad.sum())


def stratum_queries(base: ProfileQuery) -> dict[str, ProfileQuery]:
    """The four strata of a cell, keyed as in ``STRATA``."""
    return {
        "exposed_after": base.refine(exposed=1, period="after"),
        "exposed_before": base.refine(exposed=1, period="before"),
        "control_after": base.refine(exposed=0, period="after"),
        "control_before": base.refine(exposed=0, period="before"),
    }


def standardised_change(
    latent_draws: FloatArray,
    frame: AnalysisFrame,
    base: ProfileQuery | None = None,
    *,
    cell: dict[str, str] | None = None,
    aggregation: Aggregation = "linear_predictor",
    adjustment: Adjustment = "multiplicative",
    level: float = 0.95,
) -> EffectSummary:
    """rho for one cell, plus after-period exposed/control prevalences and their ratio.

    Any EMPTY stratum makes the whole cell EMPTY; the reason names the
    missing strata.
    """
    base = base or ProfileQuery()
    strata: dict[str, StratumMu] = {
        name: marginal_mu(latent_draws, frame, query, aggregation=aggregation)
        for name, query in stratum_queries(base).items()
    }
    counts = {name: strata[name].n_observations for name in STRATA}
    missing = [name for name in STRATA if strata[name].empty]
    if missing:
        return EffectSummary(
            cell=cell or {},
            status="empty",
            reason=f"no observations in {', '.join(missing)}",
            n_observations=counts,
        )
    if latent_draws.shape[0] == 0:
        return EffectSummary(cell=cell or {}, status="empty", reason="no posterior draws", n_observations=counts)

    ea, eb, ca, cb = (strata[name].values for name in STRATA)
    assert ea is not None and eb is not None and ca is not None and cb is not None
    rho, excluded = rho_draws(ea, eb, ca, cb, adjustment)
    if excluded:
        log.warning("Excluded %d draws with undefined rho for cell %s", excluded, cell or "national")
    kept = rho[np.isfinite(rho)]
    return EffectSummary(
        cell=cell or {},
        prevalence_exposed=prevalence(ea, level),
        prevalence_control=prevalence(ca, level),
        ratio=exposed_control_ratio(prevalence_draws(ea), prevalence_draws(ca), level),
        rho=summarize(kept, level) if kept.size else None,
        status="ok" if kept.size else "empty",
        reason=None if kept.size else "every draw had an undefined rho",
        n_observations=counts,
        excluded_draws=excluded,
    )
