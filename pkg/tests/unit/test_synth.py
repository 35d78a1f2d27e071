"""Tests for scenarios, the forward simulator and the dataset writer."""

from __future__ import annotations

from pathlib import Path
from typing import Any

import numpy as np
import pytest
from pydantic import ValidationError

from policy_its.cohort.dictionary import DataDictionary
from policy_its.cohort.ghq import dichotomize_ghq
from policy_its.cohort.ingest import read_areas_csv, read_cohort_csv
from policy_its.core.exceptions import ConfigError, DataValidationError
from policy_its.effects.change import rho_draws
from policy_its.effects.models import STRATA
from policy_its.intervention.ingest import read_rollout_csv
from policy_its.intervention.models import InterventionDefinition, RolloutSeries
from policy_its.intervention.rollout import awareness_month
from policy_its.intervention.timeline import build_timelines
from policy_its.synth.scenarios import ScenarioConfig, get_scenario, scenario_library
from policy_its.synth.simulate import ghq_items_for, rollout_counts, simulate, true_effects
from policy_its.synth.writer import DATASET_FILES, read_truth, write_dataset

TINY: dict[str, Any] = {"n_areas": 10, "n_persons_per_area": 5, "study_start": 2014, "n_years": 4}


def _series(counts: list[int]) -> RolloutSeries:
    from datetime import date

    months = tuple(date(2010 + i // 12, i % 12 + 1, 1) for i in range(len(counts)))
    return RolloutSeries(area_id="X", months=months, counts=tuple(counts))


class TestRolloutCounts:
    def test_never_aware_is_all_zero(self) -> None:
        assert rollout_counts(24, None, 500, 25.0, ramp_months=6) == [0] * 24

    @pytest.mark.parametrize("crossing", [0, 1, 5, 17, 35])
    @pytest.mark.parametrize("pct", [5.0, 25.0, 45.0])
    def test_first_crossing_is_the_requested_month(self, crossing: int, pct: float) -> None:
        counts = rollout_counts(36, crossing, 1200, pct, ramp_months=12)
        series = _series(counts)
        month = awareness_month(series, pct)
        assert month == series.months[crossing]
        assert counts[-1] == 1200
        assert all(b >= a for a, b in zip(counts, counts[1:]))

    def test_instant_adoption_agrees_across_definitions(self) -> None:
        counts = rollout_counts(24, 7, 300, 25.0, ramp_months=6, instant=True)
        series = _series(counts)
        assert {awareness_month(series, pct) for pct in (5.0, 25.0, 45.0, 100.0)} == {series.months[7]}

    def test_ramp_starts_before_crossing(self) -> None:
        counts = rollout_counts(36, 20, 1000, 25.0, ramp_months=8)
        assert counts[11] == 0
        assert counts[12] == 1
        assert counts[20] == 250


class TestGhqItems:
    def test_items_reproduce_outcome(self) -> None:
        rng = np.random.default_rng(5)
        for outcome in (0, 1) * 200:
            items = ghq_items_for(outcome, rng)
            assert len(items) == 12
            assert dichotomize_ghq(items) == outcome


class TestScenarios:
    def test_library(self) -> None:
        library = scenario_library(seed=1)
        assert sorted(library) == ["HETEROGENEOUS", "NULL", "PAPER-LIKE"]
        assert library["NULL"].coefficient("exposed:intervention") == 0.0
        assert library["PAPER-LIKE"].coefficient("exposed:intervention") > 0.0
        assert library["HETEROGENEOUS"].effect_heterogeneity > 0.0

    def test_unknown_scenario(self) -> None:
        with pytest.raises(ConfigError, match="Unknown scenario"):
            get_scenario("NOPE", seed=1)

    def test_overrides(self) -> None:
        scenario = get_scenario("NULL", seed=4, overrides=TINY)
        assert scenario.n_areas == 10
        assert scenario.study_years == [2014, 2015, 2016, 2017]
        assert scenario.seed == 4

    def test_invalid_override(self) -> None:
        with pytest.raises(ConfigError):
            get_scenario("NULL", seed=1, overrides={"n_areas": 3})

    def test_unknown_beta_column(self) -> None:
        with pytest.raises(ValidationError):
            ScenarioConfig(seed=1, beta={"slope": 1.0})

    def test_awareness_years_length(self) -> None:
        with pytest.raises(ValidationError):
            ScenarioConfig(seed=1, n_areas=10, awareness_years=[2015] * 3)


class TestSimulate:
    def test_deterministic_per_seed(self) -> None:
        first = simulate(get_scenario("PAPER-LIKE", seed=9, overrides=TINY))
        again = simulate(get_scenario("PAPER-LIKE", seed=9, overrides=TINY))
        other = simulate(get_scenario("PAPER-LIKE", seed=10, overrides=TINY))
        assert first.records == again.records
        assert first.truth == again.truth
        assert first.records != other.records

    def test_ids_and_sizes(self) -> None:
        dataset = simulate(get_scenario("NULL", seed=2, overrides=TINY))
        assert [a.area_id for a in dataset.areas][:2] == ["A001", "A002"]
        assert dataset.records[0].person_id == "A001-P0001"
        assert dataset.truth.n_rows == len(dataset.records)
        assert len({r.person_id for r in dataset.records}) == 50
        assert abs(sum(dataset.truth.gamma)) < 1e-12
        assert abs(sum(dataset.truth.delta)) < 1e-12

    def test_rollout_recovers_awareness_years(self) -> None:
        scenario = get_scenario("PAPER-LIKE", seed=3, overrides={**TINY, "never_fraction": 0.3})
        dataset = simulate(scenario)
        definition = InterventionDefinition(kind="awareness", pct=scenario.threshold_pct)
        timelines = build_timelines(dataset.rollout, definition, scenario.window)
        assert timelines.as_dict() == dataset.truth.awareness_years

    def test_pinned_awareness_years(self) -> None:
        pinned = [2015, None, 2016, 2017, 2014, 2015, None, 2016, 2017, 2015]
        dataset = simulate(get_scenario("NULL", seed=3, overrides={**TINY, "awareness_years": pinned}))
        assert list(dataset.truth.awareness_years.values()) == pinned
        assert sum(dataset.rollout[1].counts) == 0

    def test_years_outside_dictionary_window(self) -> None:
        with pytest.raises(DataValidationError):
            simulate(get_scenario("NULL", seed=1, overrides={**TINY, "study_start": 2001}))

    def test_undeclared_confounder_effect(self) -> None:
        scenario = get_scenario("NULL", seed=1, overrides={**TINY, "confounder_effects": {"sex[other]": 1.0}})
        with pytest.raises(ConfigError, match="undeclared"):
            simulate(scenario)

    def test_category_frequencies_need_every_level(self) -> None:
        scenario = get_scenario("NULL", seed=1, overrides={**TINY, "category_frequencies": {"sex": [1.0]}})
        with pytest.raises(ConfigError):
            simulate(scenario)


class TestTrueEffects:
    def test_national_rho_from_stratum_means(self) -> None:
        truth = simulate(get_scenario("PAPER-LIKE", seed=6, overrides={"n_persons_per_area": 30})).truth
        effects = true_effects(truth, adjustment="additive")
        strata = truth.national_strata
        assert all(strata[name] is not None for name in STRATA)
        rho, _ = rho_draws(*(np.array([strata[name]]) for name in STRATA), adjustment="additive")
        assert effects.national_rho == pytest.approx(float(rho[0]))
        assert set(effects.area_rho) == set(truth.area_ids)

    def test_intervention_effect_raises_true_rho(self) -> None:
        overrides = {"n_persons_per_area": 30}
        null = true_effects(simulate(get_scenario("NULL", seed=6, overrides=overrides)).truth)
        effect = true_effects(simulate(get_scenario("PAPER-LIKE", seed=6, overrides=overrides)).truth)
        assert null.national_rho is not None and effect.national_rho is not None
        assert effect.national_rho > null.national_rho

    def test_heterogeneity_spreads_area_effects(self) -> None:
        flat = simulate(get_scenario("PAPER-LIKE", seed=2, overrides=TINY)).truth
        varied = simulate(get_scenario("HETEROGENEOUS", seed=2, overrides=TINY)).truth
        assert set(flat.area_intervention_effect.values()) == {0.25}
        assert len(set(varied.area_intervention_effect.values())) == 10


class TestWriter:
    def test_files_round_trip_through_ingest(self, tmp_path: Path, dictionary: DataDictionary) -> None:
        dataset = simulate(get_scenario("PAPER-LIKE", seed=8, overrides=TINY))
        paths = write_dataset(dataset, tmp_path / "data")
        assert sorted(paths) == sorted(DATASET_FILES)
        assert read_cohort_csv(paths["cohort.csv"], dictionary) == dataset.records
        assert read_areas_csv(paths["areas.csv"]) == dataset.areas
        assert read_rollout_csv(paths["rollout.csv"]) == dataset.rollout
        assert read_truth(paths["truth.json"]) == dataset.truth

    def test_bytes_are_deterministic(self, tmp_path: Path) -> None:
        scenario = get_scenario("NULL", seed=8, overrides=TINY)
        first = write_dataset(simulate(scenario), tmp_path / "one")
        second = write_dataset(simulate(scenario), tmp_path / "two")
        for name in DATASET_FILES:
            assert first[name].read_bytes() == second[name].read_bytes()
