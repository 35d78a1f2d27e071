"""Shared fixtures for policy-its tests."""

from __future__ import annotations

import json
from collections.abc import Callable
from pathlib import Path
from typing import Any

import numpy as np
import pytest

from policy_its.cohort.dictionary import DataDictionary
from policy_its.cohort.models import AreaAttributes, ConfounderProfile, Observation, RawResponse
from policy_its.core.config import InferenceConfig, InputConfig, OutputConfig, PersistenceConfig, RunConfig
from policy_its.intervention.models import InterventionDefinition, InterventionTimeline
from policy_its.intervention.timeline import TimelineSet
from policy_its.model.design import Design, build_design
from policy_its.synth.scenarios import get_scenario
from policy_its.synth.simulate import SyntheticDataset, simulate
from policy_its.synth.writer import write_dataset

FIXTURES = Path(__file__).parent / "fixtures"

# ── Slow marker ──────────────────────────────────────────────────────


def pytest_addoption(parser: pytest.Parser) -> None:
    parser.addoption("--run-slow", action="store_true", default=False, help="run recovery and oracle ensembles")


def pytest_collection_modifyitems(config: pytest.Config, items: list[pytest.Item]) -> None:
    if config.getoption("--run-slow"):
        return
    skip_slow = pytest.mark.skip(reason="slow; enable with --run-slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


# ── Fixture files ────────────────────────────────────────────────────


@pytest.fixture
def load_fixture() -> Callable[[str], Any]:
    def _load(name: str) -> Any:
        return json.loads((FIXTURES / name).read_text(encoding="utf-8"))

    return _load


# ── Records ──────────────────────────────────────────────────────────


@pytest.fixture
def dictionary() -> DataDictionary:
    return DataDictionary()


@pytest.fixture
def make_raw() -> Callable[..., RawResponse]:
    """RawResponse factory with a working-age, fully responding control default."""

    def _make(**overrides: Any) -> RawResponse:
        values: dict[str, Any] = {
            "person_id": "p1",
            "area_id": "A01",
            "interview_year": 2015,
            "ghq_items": (0,) * 12,
            "employment_status": "employed full time",
            "age": 30,
            "education": "degree or higher",
            "ethnicity": "white",
            "marital_status": "married or civil partnership",
            "sex": "female",
            "base_weight": 1.0,
            "wave_responses": (True, True, True),
        }
        values.update(overrides)
        return RawResponse(**values)

    return _make


@pytest.fixture
def make_observation() -> Callable[..., Observation]:
    def _make(**overrides: Any) -> Observation:
        profile: dict[str, Any] = {
            "age_band": "[25,35)",
            "education": "degree or higher",
            "ethnicity": "white",
            "marital_status": "married or civil partnership",
            "sex": "female",
            "deprivation_decile": 1,
            "ethnic_mix_quintile": 1,
        }
        profile.update(overrides.pop("confounders", {}))
        values: dict[str, Any] = {
            "person_id": "p1",
            "area_id": "A01",
            "year_index": 2015,
            "outcome": 0,
            "exposed": 0,
            "confounders": ConfounderProfile(**profile),
            "weight": 1.0,
            "age": 30,
        }
        values.update(overrides)
        return Observation(**values)

    return _make


@pytest.fixture
def ten_areas() -> list[AreaAttributes]:
    """Areas A01..A10 with IMD score and minority share rising with the index."""
    return [
        AreaAttributes(area_id=f"A{i:02d}", imd_score=float(i), ethnic_minority_proportion=i / 20.0)
        for i in range(1, 11)
    ]


# ── Small hand-built design ──────────────────────────────────────────

SMALL_WINDOW = (2014, 2017)


@pytest.fixture
def small_timelines() -> TimelineSet:
    """A01 aware from 2015, A02 from 2017, A03 never."""
    definition = InterventionDefinition(kind="awareness", pct=25)
    timelines = TimelineSet(definition=definition, window=SMALL_WINDOW)
    for area_id, year in (("A01", 2015), ("A02", 2017), ("A03", None)):
        timelines.timelines[area_id] = InterventionTimeline(area_id=area_id, awareness_year=year, definition=definition)
    return timelines


@pytest.fixture
def small_observations(make_observation: Callable[..., Observation]) -> list[Observation]:
    """Three areas, four years, six persons per area; outcomes drawn with a fixed seed."""
    rng = np.random.default_rng(3)
    sexes = ("female", "male")
    observations = []
    for a, area_id in enumerate(("A01", "A02", "A03")):
        for p in range(6):
            exposed = int(p < 2)
            for year in range(SMALL_WINDOW[0], SMALL_WINDOW[1] + 1):
                observations.append(
                    make_observation(
                        person_id=f"{area_id}-{p}",
                        area_id=area_id,
                        year_index=year,
                        outcome=int(rng.random() < 0.2 + 0.2 * exposed),
                        exposed=exposed,
                        weight=0.75 + 0.1 * p,
                        confounders={"sex": sexes[p % 2], "deprivation_decile": a + 1},
                    )
                )
    return observations


@pytest.fixture
def small_design(
    small_observations: list[Observation],
    small_timelines: TimelineSet,
    dictionary: DataDictionary,
) -> Design:
    return build_design(small_observations, small_timelines, dictionary)


# ── Synthetic desk dataset ───────────────────────────────────────────

DESK_OVERRIDES: dict[str, Any] = {
    "n_areas": 12,
    "n_persons_per_area": 15,
    "study_start": 2014,
    "n_years": 6,
    "exposure_rate": 0.25,
}


@pytest.fixture(scope="session")
def desk_dataset() -> SyntheticDataset:
    return simulate(get_scenario("PAPER-LIKE", seed=11, overrides=DESK_OVERRIDES))


@pytest.fixture(scope="session")
def desk_data_dir(desk_dataset: SyntheticDataset, tmp_path_factory: pytest.TempPathFactory) -> Path:
    out = tmp_path_factory.mktemp("desk_data")
    write_dataset(desk_dataset, out)
    return out


@pytest.fixture
def desk_config(desk_data_dir: Path, tmp_path: Path) -> RunConfig:
    """Small, fast run configuration over the desk dataset; outputs under *tmp_path*."""
    return RunConfig(
        inputs=InputConfig(
            cohort_csv=desk_data_dir / "cohort.csv",
            rollout_csv=desk_data_dir / "rollout.csv",
            areas_csv=desk_data_dir / "areas.csv",
        ),
        inference=InferenceConfig(seed=5, n_draws=80, grid_size=3),
        output=OutputConfig(out_dir=tmp_path / "out"),
        persistence=PersistenceConfig(backend="file"),
    )
