"""Non-response adjustment of wave-1 cross-sectional weights.

A simplification of the panel-survey procedure: the probability of responding
at every wave after the first is modelled by a plain logistic regression on
the person's wave-1 confounder profile, and each base weight is divided by
that probability. Weights are rescaled to mean 1 over the persons kept.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
import statsmodels.api as sm

from policy_its.cohort.dictionary import INDIVIDUAL_FIELDS, DataDictionary
from policy_its.cohort.exposure import assign_age_band
from policy_its.cohort.models import RawResponse
from policy_its.core.exceptions import ConfigError
from policy_its.validation.models import ExclusionReason

log = logging.getLogger(__name__)


@dataclass
class WeightAdjustment:
    """Per-person weights and the bookkeeping behind them."""

    weights: dict[str, float] = field(default_factory=dict)
    raw_weights: dict[str, float] = field(default_factory=dict)
    response_probability: dict[str, float] = field(default_factory=dict)
    flagged: set[str] = field(default_factory=set)
    excluded: dict[str, ExclusionReason] = field(default_factory=dict)


def _wave_one_records(records: Sequence[RawResponse]) -> dict[str, RawResponse]:
    first: dict[str, RawResponse] = {}
    for record in records:
        current = first.get(record.person_id)
        if current is None or record.interview_year < current.interview_year:
            first[record.person_id] = record
    return first


def _covariate_value(record: RawResponse, name: str, dictionary: DataDictionary) -> str:
    if name == "age_band":
        return assign_age_band(record.age, dictionary) or dictionary.age_bands[0]
    return str(getattr(record, name))


def _response_design(
    persons: list[RawResponse],
    covariates: Sequence[str],
    dictionary: DataDictionary,
) -> pd.DataFrame:
    columns: dict[str, list[float]] = {"const": [1.0] * len(persons)}
    for name in covariates:
        values = [_covariate_value(p, name, dictionary) for p in persons]
        for level in dictionary.levels(name)[1:]:
            columns[f"{name}[{level}]"] = [float(v == level) for v in values]
    frame = pd.DataFrame(columns)
    # Levels absent from the sample carry no information.
    keep = [c for c in frame.columns if c == "const" or frame[c].any()]
    return frame[keep]


def _fit_response_model(design: pd.DataFrame, responded: np.ndarray) -> np.ndarray:
    rate = float(responded.mean())
    if rate in (0.0, 1.0):
        return np.full(len(responded), rate)
    try:
        result = sm.GLM(responded, design, family=sm.families.Binomial()).fit()
        fitted = np.asarray(result.predict(design), dtype=float)
    except (np.linalg.LinAlgError, ValueError) as exc:
        log.warning("Response model failed (%s); using the overall response rate", exc)
        return np.full(len(responded), rate)
    if not np.all(np.isfinite(fitted)):
        log.warning("Response model produced non-finite probabilities; using the overall response rate")
        return np.full(len(responded), rate)
    return fitted


def adjust_weights(
    records: Sequence[RawResponse],
    response_model_covariates: Sequence[str],
    *,
    dictionary: DataDictionary | None = None,
    floor: float = 0.01,
) -> WeightAdjustment:
    """Return weight = base_weight / p(respond to all subsequent waves), mean 1.

    Persons without a wave-1 response or without a base weight are excluded
    with a reason. Probabilities below *floor* are clamped and flagged.
    """
    dictionary = dictionary or DataDictionary()
    unknown = [c for c in response_model_covariates if c not in INDIVIDUAL_FIELDS]
    if unknown:
        raise ConfigError(f"Response model covariates must be individual-level fields, got {unknown}")

    result = WeightAdjustment()
    persons: list[RawResponse] = []
    for person_id, record in _wave_one_records(records).items():
        if not record.responded_wave_one:
            result.excluded[person_id] = ExclusionReason.ABSENT_AT_WAVE_ONE
            log.info("Excluding person %s: absent at wave one", person_id)
        elif record.base_weight is None or record.base_weight <= 0:
            result.excluded[person_id] = ExclusionReason.MISSING_BASE_WEIGHT
            log.info("Excluding person %s: missing wave-one base weight", person_id)
        else:
            persons.append(record)

    if not persons:
        return result

    responded = np.array([float(p.responded_all_subsequent) for p in persons])
    design = _response_design(persons, response_model_covariates, dictionary)
    probability = _fit_response_model(design, responded)

    for person, p_hat in zip(persons, probability):
        p = float(p_hat)
        if p < floor:
            result.flagged.add(person.person_id)
            p = floor
        assert person.base_weight is not None
        result.response_probability[person.person_id] = p
        result.raw_weights[person.person_id] = person.base_weight / p

    if result.flagged:
        log.warning("Clamped %d response probabilities to the floor %.3g", len(result.flagged), floor)

    mean = float(np.mean(list(result.raw_weights.values())))
    result.weights = {pid: w / mean for pid, w in result.raw_weights.items()}
    return result
