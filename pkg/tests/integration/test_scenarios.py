"""End-to-end runs over purpose-built synthetic scenarios."""

from __future__ import annotations

from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from policy_its.core.config import InferenceConfig, InputConfig, OutputConfig, RunConfig
from policy_its.formatters.csv_formatter import read_result_csv
from policy_its.intervention.models import InterventionDefinition
from policy_its.persistence import create_backend
from policy_its.services.artifact_store import ArtifactStore
from policy_its.services.pipeline import load_inputs, run_effects, run_fit
from policy_its.services.sensitivity import run_sensitivity
from policy_its.synth.scenarios import get_scenario
from policy_its.synth.simulate import simulate
from policy_its.synth.writer import write_dataset

SPREAD_OVERRIDES: dict[str, Any] = {"n_years": 8, "exposure_rate": 0.3}
INSTANT_OVERRIDES: dict[str, Any] = {
    "n_areas": 10,
    "n_persons_per_area": 15,
    "study_start": 2014,
    "n_years": 6,
    "exposure_rate": 0.25,
    "instant_adoption": True,
}


def _config(scenario: str, seed: int, overrides: dict[str, Any], root: Path, n_draws: int) -> RunConfig:
    data_dir = root / "data"
    write_dataset(simulate(get_scenario(scenario, seed=seed, overrides=overrides)), data_dir)
    return RunConfig(
        inputs=InputConfig(
            cohort_csv=data_dir / "cohort.csv",
            rollout_csv=data_dir / "rollout.csv",
            areas_csv=data_dir / "areas.csv",
        ),
        inference=InferenceConfig(seed=seed, n_draws=n_draws, grid_size=1),
        output=OutputConfig(out_dir=root / "out"),
    )


def _area_rho_spread(config: RunConfig) -> float:
    data = load_inputs(config)
    definition = config.intervention.definition
    store = ArtifactStore(create_backend(config.persistence, config.artifact_dir))
    run_fit(config, data, definition, store)
    outcome = run_effects(config, data, definition, store, config.output.out_dir)
    medians = [c.rho.median for c in outcome.report.area.populated() if c.rho is not None]
    assert len(medians) >= 10
    return float(np.std(medians))


class TestAreaHeterogeneity:
    def test_heterogeneous_areas_spread_wider_than_null(self, tmp_path: Path) -> None:
        heterogeneous = _area_rho_spread(_config("HETEROGENEOUS", 31, SPREAD_OVERRIDES, tmp_path / "het", 200))
        null = _area_rho_spread(_config("NULL", 31, SPREAD_OVERRIDES, tmp_path / "null", 200))
        assert heterogeneous > null


class TestInstantAdoption:
    def test_every_definition_gives_the_same_tables(self, tmp_path: Path) -> None:
        config = _config("PAPER-LIKE", 17, INSTANT_OVERRIDES, tmp_path, 40)
        definitions = [
            InterventionDefinition(kind="introduction"),
            InterventionDefinition(kind="awareness", pct=5.0),
            InterventionDefinition(kind="awareness", pct=25.0),
            InterventionDefinition(kind="awareness", pct=45.0),
        ]
        labels = [d.label for d in definitions]
        outcome = run_sensitivity(config, definitions)
        assert len({r.never_aware for r in outcome.results}) == 1

        trend = read_result_csv(config.output.out_dir / "sensitivity_trend.csv")
        for label in labels[1:]:
            for group in ("exposed", "control"):
                for stat in ("median", "lower", "upper"):
                    np.testing.assert_array_equal(
                        trend[f"{label}_{group}_{stat}"].to_numpy(), trend[f"{labels[0]}_{group}_{stat}"].to_numpy()
                    )

        rho = read_result_csv(config.output.out_dir / "sensitivity_rho.csv")
        assert list(rho["definition"]) == labels
        values = rho.drop(columns=["definition"])
        for index in range(1, len(labels)):
            pd.testing.assert_series_equal(values.iloc[index], values.iloc[0], check_names=False)
        assert set(rho["status"]) == {"OK"}
