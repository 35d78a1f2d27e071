"""Forward simulation of a staggered-rollout panel from known ITS parameters.

One ``SeedSequence`` is split into a global stream (area attributes, random
effects, awareness years) and one stream per area (rollout shape, persons,
outcomes), so a dataset is bit-reproducible per seed and areas can be
generated independently.
"""

from __future__ import annotations

import logging
import math
from collections import defaultdict
from collections.abc import Sequence
from dataclasses import dataclass
from datetime import date

import numpy as np
from pydantic import BaseModel, Field
from scipy.special import expit

from policy_its.cohort.dictionary import CONFOUNDER_FIELDS, DataDictionary
from policy_its.cohort.exposure import assign_age_band
from policy_its.cohort.ghq import GHQ_CASE_THRESHOLD, GHQ_ITEM_COUNT, dichotomize_ghq
from policy_its.cohort.grouping import group_deprivation, group_ethnic_mix
from policy_its.cohort.models import AreaAttributes, RawResponse
from policy_its.core.exceptions import ConfigError, DataValidationError
from policy_its.effects.change import Adjustment, rho_draws
from policy_its.effects.models import STRATA
from policy_its.intervention.models import RolloutSeries
from policy_its.intervention.timeline import center_time
from policy_its.model.layout import FIXED_ITS_COLUMNS, dummy_column
from policy_its.synth.scenarios import ScenarioConfig
from policy_its.validation.models import ValidationIssue

log = logging.getLogger(__name__)

_SAMPLED_FIELDS: tuple[str, ...] = ("education", "ethnicity", "marital_status", "sex")
_EFFECT_INDEX = FIXED_ITS_COLUMNS.index("exposed:intervention")


# ── Ground truth ─────────────────────────────────────────────────────


class GroundTruth(BaseModel):
    """Everything the generator knew; written next to the data, never read by fits.

    ``national_strata`` and ``area_strata`` hold the unweighted mean true
    linear predictor of every stratum over the rows the cohort build keeps.
    """

    scenario: ScenarioConfig
    columns: list[str] = Field(default_factory=lambda: list(FIXED_ITS_COLUMNS))
    beta: list[float]
    confounder_effects: dict[str, float]
    years: list[int]
    gamma: list[float]
    area_ids: list[str]
    delta: list[float]
    sigma_gamma: float
    sigma_delta: float
    awareness_years: dict[str, int | None]
    area_intervention_effect: dict[str, float]
    window: tuple[int, int]
    national_strata: dict[str, float | None]
    area_strata: dict[str, dict[str, float | None]]
    n_rows: int
    n_eligible: int
    prevalence: float

    def named_beta(self) -> dict[str, float]:
        return dict(zip(self.columns, self.beta))


class TrueEffects(BaseModel):
    """Standardised change evaluated at the true parameters."""

    adjustment: Adjustment
    national_rho: float | None
    area_rho: dict[str, float | None]

    def area_spread(self) -> float:
        values = [v for v in self.area_rho.values() if v is not None]
        return float(np.std(values)) if len(values) > 1 else 0.0


def _rho_from_strata(strata: dict[str, float | None], adjustment: Adjustment) -> float | None:
    if any(strata.get(name) is None for name in STRATA):
        return None
    ea, eb, ca, cb = (np.array([strata[name]], dtype=np.float64) for name in STRATA)
    rho, excluded = rho_draws(ea, eb, ca, cb, adjustment)
    return None if excluded else float(rho[0])


def true_effects(
    truth: GroundTruth,
    adjustment: Adjustment = "multiplicative",
) -> TrueEffects:
    """National and per-area rho from the stored true stratum means."""
    return TrueEffects(
        adjustment=adjustment,
        national_rho=_rho_from_strata(truth.national_strata, adjustment),
        area_rho={area: _rho_from_strata(strata, adjustment) for area, strata in truth.area_strata.items()},
    )


@dataclass
class SyntheticDataset:
    """Records in ingestion form plus the truth behind them."""

    records: list[RawResponse]
    rollout: list[RolloutSeries]
    areas: list[AreaAttributes]
    truth: GroundTruth


# ── Validation ───────────────────────────────────────────────────────


def _check_scenario(config: ScenarioConfig, dictionary: DataDictionary) -> None:
    issues: list[ValidationIssue] = []
    if not config.fits_window(dictionary):
        issues.append(
            ValidationIssue(
                f"study years must lie in {dictionary.study_start}..{dictionary.study_end}",
                field="study_start",
                value=f"{config.study_start}..{config.study_end}",
            )
        )
    lo, hi = config.window
    if config.awareness_years is not None:
        issues.extend(
            ValidationIssue(
                f"awareness year outside {lo}..{hi}", row=index + 1, field="awareness_years", value=str(y)
            )
            for index, y in enumerate(config.awareness_years)
            if y is not None and not lo <= y <= hi
        )
    else:
        first, last = config.adoption_window
        if first < lo or last > hi:
            issues.append(
                ValidationIssue(f"adoption years outside {lo}..{hi}", field="adoption_years", value=f"{first}..{last}")
            )
    if issues:
        raise DataValidationError(f"Scenario {config.name} has awareness years outside the study window", issues)

    declared = {dummy_column(f, level) for f in CONFOUNDER_FIELDS for level in dictionary.levels(f)}
    named = {"confounder_effects": config.confounder_effects, "response_effects": config.response_effects}
    for label, effects in named.items():
        unknown = sorted(set(effects) - declared)
        if unknown:
            raise ConfigError(f"{label} names undeclared dummy columns: {unknown}")
    for name, freqs in config.category_frequencies.items():
        if name not in _SAMPLED_FIELDS:
            raise ConfigError(f"category_frequencies supports {list(_SAMPLED_FIELDS)}, got {name!r}")
        if len(freqs) != len(dictionary.levels(name)):
            raise ConfigError(f"category_frequencies[{name!r}] needs one entry per declared level")


# ── Rollout ──────────────────────────────────────────────────────────


def _months(config: ScenarioConfig) -> list[date]:
    return [date(year, month, 1) for year in config.study_years for month in range(1, 13)]


def rollout_counts(
    n_months: int,
    crossing: int | None,
    final: int,
    threshold_pct: float,
    *,
    ramp_months: int,
    instant: bool = False,
) -> list[int]:
    """Piecewise-linear counts whose first threshold crossing is month *crossing*.

    Counts ramp from 1 at ``crossing - ramp_months`` to the threshold count
    at *crossing*, then to *final* at the last month. ``instant`` jumps
    straight to *final* at *crossing*, so every definition agrees.
    """
    if crossing is None:
        return [0] * n_months
    last = n_months - 1
    if instant:
        return [0 if i < crossing else final for i in range(n_months)]
    threshold = max(1, math.ceil(round(threshold_pct * final / 100.0, 9)))
    start = max(0, crossing - ramp_months)
    counts = []
    for i in range(n_months):
        if i < start:
            counts.append(0)
        elif i < crossing:
            counts.append(1 + (threshold - 1) * (i - start) // (crossing - start))
        elif crossing == last:
            counts.append(final)
        else:
            counts.append(threshold + (final - threshold) * (i - crossing) // (last - crossing))
    return counts


# ── Persons ──────────────────────────────────────────────────────────


def ghq_items_for(outcome: int, rng: np.random.Generator) -> tuple[int, ...]:
    """Twelve items whose caseness score is at least 4 exactly when *outcome* is 1."""
    low, high = (GHQ_CASE_THRESHOLD, GHQ_ITEM_COUNT + 1) if outcome else (0, GHQ_CASE_THRESHOLD)
    score = int(rng.integers(low, high))
    items = rng.integers(0, 2, size=GHQ_ITEM_COUNT)
    cases = rng.permutation(GHQ_ITEM_COUNT)[:score]
    items[cases] = rng.integers(2, 4, size=score)
    return tuple(int(i) for i in items)


def _frequencies(config: ScenarioConfig, dictionary: DataDictionary, name: str) -> np.ndarray:
    freqs = np.asarray(config.category_frequencies.get(name, [1.0] * len(dictionary.levels(name))), dtype=np.float64)
    return freqs / freqs.sum()


def _effect_sum(effects: dict[str, float], levels: dict[str, str]) -> float:
    return sum(effects.get(dummy_column(f, level), 0.0) for f, level in levels.items())


@dataclass
class _AreaContext:
    area_id: str
    awareness_year: int | None
    beta: np.ndarray
    delta: float
    deprivation_decile: int
    ethnic_mix_quintile: int


def _simulate_area(
    ctx: _AreaContext,
    config: ScenarioConfig,
    dictionary: DataDictionary,
    gamma: np.ndarray,
    rng: np.random.Generator,
    strata: dict[str, list[float]],
) -> tuple[RolloutSeries, list[RawResponse]]:
    months = _months(config)
    final = 100 * int(rng.integers(5, 51))
    crossing_month = int(rng.integers(1, 13))
    crossing = None
    if ctx.awareness_year is not None:
        crossing = (ctx.awareness_year - config.study_start) * 12 + crossing_month - 1
    series = RolloutSeries(
        area_id=ctx.area_id,
        months=tuple(months),
        counts=tuple(
            rollout_counts(
                len(months),
                crossing,
                final,
                config.threshold_pct,
                ramp_months=config.ramp_months,
                instant=config.instant_adoption,
            )
        ),
    )

    window = (dictionary.study_start, dictionary.study_end)
    others = [
        s for s in dictionary.employment_statuses if s not in (dictionary.exposed_status, dictionary.excluded_status)
    ]
    probabilities = {name: _frequencies(config, dictionary, name) for name in _SAMPLED_FIELDS}
    records: list[RawResponse] = []
    for p in range(config.n_persons_per_area):
        person_id = f"{ctx.area_id}-P{p + 1:04d}"
        base_age = int(rng.integers(16, 65))
        person = {
            name: dictionary.levels(name)[int(rng.choice(len(probs), p=probs))] for name, probs in probabilities.items()
        }
        baseline_band = assign_age_band(base_age, dictionary)
        response_levels = dict(person, age_band=baseline_band) if baseline_band else dict(person)
        p_respond = float(expit(config.response_intercept + _effect_sum(config.response_effects, response_levels)))
        full = bool(rng.random() < p_respond) or config.n_years == 1
        dropout = config.n_years if full else int(rng.integers(1, config.n_years))
        waves = tuple(j < dropout for j in range(config.n_years))
        base_weight = 1.0
        if config.base_weight_sd:
            base_weight = round(float(np.exp(config.base_weight_sd * rng.standard_normal())), 6)

        for j, year in enumerate(config.study_years):
            if not waves[j]:
                continue
            age = base_age + j
            u = rng.random()
            other = others[int(rng.integers(0, len(others)))]
            if u < config.lifetime_sick_rate:
                status = dictionary.excluded_status
            elif u < config.lifetime_sick_rate + config.exposure_rate:
                status = dictionary.exposed_status
            else:
                status = other
            exposed = int(status == dictionary.exposed_status)

            ct = center_time(year, ctx.awareness_year, window=window)
            its = np.array([1.0, ct.year, ct.intervention, ct.year_post])
            x = np.concatenate([its, exposed * its])
            band = assign_age_band(age, dictionary)
            levels = dict(
                person,
                deprivation_decile=str(ctx.deprivation_decile),
                ethnic_mix_quintile=str(ctx.ethnic_mix_quintile),
            )
            if band is not None:
                levels["age_band"] = band
            mu = float(x @ ctx.beta) + _effect_sum(config.confounder_effects, levels) + gamma[j] + ctx.delta
            outcome = int(rng.random() < expit(mu))
            items = ghq_items_for(outcome, rng)

            if band is not None and status != dictionary.excluded_status:
                period = "after" if ct.intervention else "before"
                group = "exposed" if exposed else "control"
                strata[f"{group}_{period}"].append(mu)

            records.append(
                RawResponse(
                    person_id=person_id,
                    area_id=ctx.area_id,
                    interview_year=year,
                    ghq_items=items,
                    employment_status=status,
                    age=age,
                    base_weight=base_weight,
                    wave_responses=waves,
                    **person,
                )
            )
    return series, records


def _means(strata: dict[str, list[float]]) -> dict[str, float | None]:
    return {name: (float(np.mean(strata[name])) if strata[name] else None) for name in STRATA}


# ── Entry point ──────────────────────────────────────────────────────


def simulate(config: ScenarioConfig, dictionary: DataDictionary | None = None) -> SyntheticDataset:
    """Generate records, rollout series, area attributes and ground truth.

    Random effects are drawn at the true scales and centered to sum to zero.
    Every area's rollout crosses ``threshold_pct`` in its configured
    awareness year.
    """
    dictionary = dictionary or DataDictionary()
    _check_scenario(config, dictionary)

    streams = np.random.SeedSequence(config.seed).spawn(config.n_areas + 1)
    rng = np.random.default_rng(streams[0])
    area_ids = [f"A{index + 1:03d}" for index in range(config.n_areas)]
    imd = rng.uniform(5.0, 60.0, size=config.n_areas)
    minority = rng.beta(2.0, 8.0, size=config.n_areas)
    areas = [
        AreaAttributes(area_id=a, imd_score=round(float(s), 6), ethnic_minority_proportion=round(float(m), 6))
        for a, s, m in zip(area_ids, imd, minority)
    ]

    gamma = config.sigma_gamma * rng.standard_normal(config.n_years)
    gamma -= gamma.mean()
    delta = config.sigma_delta * rng.standard_normal(config.n_areas)
    delta -= delta.mean()

    never_draw = rng.random(config.n_areas)
    first, last = config.adoption_window
    year_draw = rng.integers(first, last + 1, size=config.n_areas)
    awareness: Sequence[int | None]
    if config.awareness_years is not None:
        awareness = config.awareness_years
    else:
        awareness = [None if u < config.never_fraction else int(y) for u, y in zip(never_draw, year_draw)]
    heterogeneity = config.effect_heterogeneity * rng.standard_normal(config.n_areas)

    deprivation = group_deprivation(areas)
    ethnic_mix = group_ethnic_mix(areas)
    base_beta = np.array(config.beta_vector(), dtype=np.float64)

    rollout: list[RolloutSeries] = []
    records: list[RawResponse] = []
    national: dict[str, list[float]] = defaultdict(list)
    area_strata: dict[str, dict[str, float | None]] = {}
    area_effect: dict[str, float] = {}
    for index, area_id in enumerate(area_ids):
        beta = base_beta.copy()
        beta[_EFFECT_INDEX] += heterogeneity[index]
        area_effect[area_id] = float(beta[_EFFECT_INDEX])
        ctx = _AreaContext(
            area_id=area_id,
            awareness_year=awareness[index],
            beta=beta,
            delta=float(delta[index]),
            deprivation_decile=deprivation[area_id],
            ethnic_mix_quintile=ethnic_mix[area_id],
        )
        strata: dict[str, list[float]] = defaultdict(list)
        series, area_records = _simulate_area(
            ctx, config, dictionary, gamma, np.random.default_rng(streams[index + 1]), strata
        )
        rollout.append(series)
        records.extend(area_records)
        area_strata[area_id] = _means(strata)
        for name, values in strata.items():
            national[name].extend(values)

    n_eligible = sum(len(v) for v in national.values())
    outcomes = [dichotomize_ghq(r.ghq_items) for r in records]
    truth = GroundTruth(
        scenario=config,
        beta=[float(b) for b in base_beta],
        confounder_effects=dict(config.confounder_effects),
        years=config.study_years,
        gamma=[float(g) for g in gamma],
        area_ids=area_ids,
        delta=[float(d) for d in delta],
        sigma_gamma=config.sigma_gamma,
        sigma_delta=config.sigma_delta,
        awareness_years=dict(zip(area_ids, awareness)),
        area_intervention_effect=area_effect,
        window=(dictionary.study_start, dictionary.study_end),
        national_strata=_means(national),
        area_strata=area_strata,
        n_rows=len(records),
        n_eligible=n_eligible,
        prevalence=float(np.mean(outcomes)) if outcomes else 0.0,
    )
    log.info(
        "Simulated scenario %s: %d areas, %d rows, prevalence %.3f, %d never-aware areas",
        config.name,
        config.n_areas,
        len(records),
        truth.prevalence,
        sum(1 for a in awareness if a is None),
    )
    return SyntheticDataset(records=records, rollout=rollout, areas=areas, truth=truth)
