"""Per-draw weighted stratum averages of the linear predictor.

With ``aggregation="linear_predictor"`` the stratum average is
``mean_w(mu) = latent @ (w_S^T A_S / sum w_S)``, one matrix-vector product for
all draws. ``aggregation="probability"`` averages ``expit(mu)`` instead and
returns its logit, so both variants live on the same scale downstream.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.special import expit, logit

from policy_its.core.types import FloatArray
from policy_its.effects.frame import AnalysisFrame
from policy_its.effects.models import ProfileQuery

Aggregation = Literal["linear_predictor", "probability"]

_CHUNK = 256


@dataclass
class StratumMu:
    """Stratum average per draw; ``values`` is None for an EMPTY stratum."""

    query: ProfileQuery
    n_observations: int
    values: FloatArray | None

    @property
    def empty(self) -> bool:
        return self.values is None


def marginal_mu(
    latent_draws: FloatArray,
    frame: AnalysisFrame,
    query: ProfileQuery,
    *,
    aggregation: Aggregation = "linear_predictor",
) -> StratumMu:
    """Weighted mean of mu over the stratum, for every draw (rows of *latent_draws*)."""
    mask = frame.mask(query)
    n = int(mask.sum())
    if n == 0:
        return StratumMu(query=query, n_observations=0, values=None)
    rows = frame.latent_matrix[np.flatnonzero(mask)]
    w = frame.weights[mask]
    w = w / w.sum()
    if aggregation == "linear_predictor":
        abar = np.asarray(rows.T @ w, dtype=np.float64).ravel()
        return StratumMu(query=query, n_observations=n, values=np.asarray(latent_draws @ abar, dtype=np.float64))

    values = np.empty(latent_draws.shape[0])
    for start in range(0, latent_draws.shape[0], _CHUNK):
        chunk = latent_draws[start : start + _CHUNK]
        mu = np.asarray(rows @ chunk.T, dtype=np.float64)
        values[start : start + _CHUNK] = logit(np.clip(w @ expit(mu), 1e-300, 1.0 - 1e-16))
    return StratumMu(query=query, n_observations=n, values=values)
