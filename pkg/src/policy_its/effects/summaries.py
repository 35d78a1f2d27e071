"""Percentile summaries of per-draw quantities.

Percentiles use numpy's ``linear`` method (sample-quantile type 7).
"""

from __future__ import annotations

import numpy as np
from scipy.special import expit

from policy_its.core.types import FloatArray
from policy_its.effects.models import Interval

PERCENTILE_METHOD = "linear"


def summarize(values: FloatArray, level: float = 0.95) -> Interval:
    """Median and equal-tailed *level* interval of *values*."""
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        raise ValueError("Cannot summarize zero draws")
    tail = 50.0 * (1.0 - level)
    lower, median, upper = np.percentile(values, [tail, 50.0, 100.0 - tail], method=PERCENTILE_METHOD)
    return Interval(median=float(median), lower=float(lower), upper=float(upper))


def prevalence_draws(mu_bar: FloatArray) -> FloatArray:
    return np.asarray(expit(mu_bar), dtype=np.float64)


def prevalence(mu_bar: FloatArray, level: float = 0.95) -> Interval:
    """Inverse-logit per draw, then summarize."""
    return summarize(prevalence_draws(mu_bar), level)


def ratio_draws(prev_exposed: FloatArray, prev_control: FloatArray) -> FloatArray:
    return np.asarray(np.asarray(prev_exposed) / np.asarray(prev_control), dtype=np.float64)


def exposed_control_ratio(prev_exposed: FloatArray, prev_control: FloatArray, level: float = 0.95) -> Interval:
    """Per-draw ratio of exposed to control prevalence, summarized."""
    return summarize(ratio_draws(prev_exposed, prev_control), level)
