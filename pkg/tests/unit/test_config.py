"""Tests for the nested run configuration: env vars, JSON files, overrides and hashing."""

from __future__ import annotations

import json
from pathlib import Path

import pytest
from pydantic import ValidationError

from policy_its.core.config import EffectsConfig, InferenceConfig, InputConfig, PriorConfig, RunConfig
from policy_its.core.exceptions import ConfigError


def _write(path: Path, payload: object) -> Path:
    path.write_text(json.dumps(payload), encoding="utf-8")
    return path


class TestDefaults:
    def test_inference_defaults(self) -> None:
        cfg = InferenceConfig()
        assert cfg.n_draws == 1000
        assert cfg.grid_size == 5
        assert cfg.rhat_threshold == 1.05

    def test_effects_defaults(self) -> None:
        cfg = EffectsConfig()
        assert cfg.aggregation == "linear_predictor"
        assert cfg.adjustment == "multiplicative"
        assert cfg.community_dimensions == ["deprivation_decile", "ethnic_mix_quintile"]

    def test_run_config_definition(self) -> None:
        assert RunConfig().intervention.definition.label == "awareness_25"
        assert [d.label for d in RunConfig().intervention.sensitivity][0] == "introduction"

    def test_prior_spec(self) -> None:
        spec = PriorConfig(intercept_variance=10.0).to_spec()
        assert spec.intercept_variance == 10.0
        assert spec.pc_alpha == 0.1

    def test_sigma_bounds_must_be_ordered(self) -> None:
        with pytest.raises(ValidationError):
            InferenceConfig(log_sigma_lower=1.0, log_sigma_upper=0.0)


class TestEnvVars:
    def test_inference_env(self, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.setenv("POLICY_ITS_INFERENCE_SEED", "7")
        monkeypatch.setenv("POLICY_ITS_INFERENCE_N_DRAWS", "25")
        cfg = InferenceConfig()
        assert cfg.seed == 7
        assert cfg.n_draws == 25

    def test_input_env(self, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.setenv("POLICY_ITS_INPUT_COHORT_CSV", "/data/panel.csv")
        assert InputConfig().cohort_csv == Path("/data/panel.csv")

    def test_effects_env(self, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.setenv("POLICY_ITS_EFFECTS_ADJUSTMENT", "additive")
        assert EffectsConfig().adjustment == "additive"


class TestFromJsonFile:
    def test_relative_paths_resolve_against_file(self, tmp_path: Path) -> None:
        path = _write(
            tmp_path / "run.json",
            {
                "inputs": {"cohort_csv": "data/cohort.csv", "data_dictionary": "/etc/dictionary.json"},
                "inference": {"seed": 5, "n_draws": 10},
                "output": {"out_dir": "results"},
            },
        )
        config = RunConfig.from_json_file(path)
        assert config.inputs.cohort_csv == tmp_path / "data/cohort.csv"
        assert config.inputs.rollout_csv == tmp_path / "data/rollout.csv"
        assert config.inputs.data_dictionary == Path("/etc/dictionary.json")
        assert config.output.out_dir == tmp_path / "results"
        assert (config.inference.seed, config.inference.n_draws) == (5, 10)

    def test_artifact_dir_resolves_against_file(self, tmp_path: Path) -> None:
        path = _write(tmp_path / "run.json", {"persistence": {"artifact_dir": "fits"}, "output": {"out_dir": "out"}})
        config = RunConfig.from_json_file(path)
        assert config.persistence.artifact_dir == tmp_path / "fits"
        assert config.artifact_dir == tmp_path / "fits"

    def test_absent_artifact_dir_follows_out_dir(self, tmp_path: Path) -> None:
        config = RunConfig.from_json_file(_write(tmp_path / "run.json", {"output": {"out_dir": "out"}}))
        assert config.persistence.artifact_dir is None
        assert config.artifact_dir == tmp_path / "out" / "artifacts"

    def test_absolute_artifact_dir_kept(self, tmp_path: Path) -> None:
        path = _write(tmp_path / "run.json", {"persistence": {"artifact_dir": "/srv/fits"}})
        assert RunConfig.from_json_file(path).persistence.artifact_dir == Path("/srv/fits")

    def test_named_queries(self, tmp_path: Path) -> None:
        path = _write(
            tmp_path / "run.json",
            {"effects": {"queries": {"north_recent": {"years": [0, 2], "areas": ["A01", "A02"]}}}},
        )
        query = RunConfig.from_json_file(path).effects.queries["north_recent"]
        assert query.years == (0, 2)
        assert query.areas == ("A01", "A02")

    def test_invalid_query(self, tmp_path: Path) -> None:
        path = _write(tmp_path / "run.json", {"effects": {"queries": {"bad": {"years": [3, 1]}}}})
        with pytest.raises(ConfigError, match="Invalid config"):
            RunConfig.from_json_file(path)

    def test_intervention_definition(self, tmp_path: Path) -> None:
        path = _write(tmp_path / "run.json", {"intervention": {"definition": {"kind": "introduction"}}})
        assert RunConfig.from_json_file(path).intervention.definition.label == "introduction"

    def test_missing_file(self, tmp_path: Path) -> None:
        with pytest.raises(ConfigError, match="not found"):
            RunConfig.from_json_file(tmp_path / "absent.json")

    def test_invalid_json(self, tmp_path: Path) -> None:
        path = tmp_path / "run.json"
        path.write_text("{seed: 1", encoding="utf-8")
        with pytest.raises(ConfigError, match="not valid JSON"):
            RunConfig.from_json_file(path)

    def test_not_an_object(self, tmp_path: Path) -> None:
        with pytest.raises(ConfigError, match="JSON object"):
            RunConfig.from_json_file(_write(tmp_path / "run.json", [1, 2]))

    def test_invalid_values(self, tmp_path: Path) -> None:
        path = _write(tmp_path / "run.json", {"inference": {"n_draws": -1}})
        with pytest.raises(ConfigError, match="Invalid config") as excinfo:
            RunConfig.from_json_file(path)
        assert excinfo.value.exit_code == 2


class TestOverrides:
    def test_seed_reaches_inference_and_synth(self) -> None:
        config = RunConfig().with_overrides(seed=11)
        assert config.inference.seed == 11
        assert config.synth.seed == 11

    def test_draws_and_out(self, tmp_path: Path) -> None:
        base = RunConfig()
        config = base.with_overrides(seed=3, draws=40, out=tmp_path)
        assert (config.inference.seed, config.inference.n_draws) == (3, 40)
        assert config.output.out_dir == tmp_path
        assert base.inference.n_draws == 1000

    def test_threshold(self) -> None:
        config = RunConfig().with_overrides(threshold_pct=45.0)
        assert config.intervention.definition.label == "awareness_45"

    def test_negative_draws(self) -> None:
        with pytest.raises(ConfigError, match="--draws"):
            RunConfig().with_overrides(draws=-1)

    def test_threshold_out_of_range(self) -> None:
        with pytest.raises(ConfigError, match="--threshold-pct"):
            RunConfig().with_overrides(threshold_pct=150.0)


class TestConfigHash:
    def test_stable_hex_digest(self) -> None:
        digest = RunConfig().config_hash()
        assert len(digest) == 64
        assert digest == RunConfig().config_hash()

    def test_ignores_locations_and_logging(self, tmp_path: Path) -> None:
        base = RunConfig()
        moved = base.model_copy(
            update={
                "inputs": InputConfig(cohort_csv=tmp_path / "other.csv"),
                "output": base.output.model_copy(update={"out_dir": tmp_path}),
                "observability": base.observability.model_copy(update={"log_level": "DEBUG"}),
                "persistence": base.persistence.model_copy(update={"backend": "memory"}),
            }
        )
        assert moved.config_hash() == base.config_hash()

    def test_tracks_result_settings(self) -> None:
        base = RunConfig()
        assert base.with_overrides(seed=1).config_hash() != base.config_hash()
        assert base.with_overrides(threshold_pct=5.0).config_hash() != base.config_hash()

    def test_artifact_dir(self, tmp_path: Path) -> None:
        config = RunConfig().with_overrides(out=tmp_path)
        assert config.artifact_dir == tmp_path / "artifacts"
        pinned = config.model_copy(
            update={"persistence": config.persistence.model_copy(update={"artifact_dir": tmp_path / "fits"})}
        )
        assert pinned.artifact_dir == tmp_path / "fits"
