"""Tests for design matrix construction and the layout manifest."""

from __future__ import annotations

from collections.abc import Callable
from pathlib import Path

import numpy as np
import pytest

from policy_its.cohort.dictionary import DataDictionary
from policy_its.cohort.models import Observation
from policy_its.core.exceptions import ArtifactError, DataValidationError
from policy_its.intervention.timeline import TimelineSet
from policy_its.model.design import Design, build_design, build_manifest
from policy_its.model.layout import FIXED_ITS_COLUMNS, LayoutManifest
from policy_its.model.params import ParameterSlices, ParameterVector
from policy_its.model.posterior import linear_predictor

# age 4 + education 2 + ethnicity 4 + marital 1 + sex 1 + deciles 9 + quintiles 4
N_DUMMIES = 25


class TestManifest:
    def test_column_order(self, dictionary: DataDictionary) -> None:
        manifest = build_manifest(dictionary, [2014, 2015], ["A01", "A02"])
        assert tuple(manifest.columns[:8]) == FIXED_ITS_COLUMNS
        assert manifest.columns[8] == "age_band[[25,35)]"
        assert manifest.n_fixed == 8 + N_DUMMIES
        assert manifest.reference_levels["sex"] == "female"
        assert manifest.reference_levels["deprivation_decile"] == "1"

    def test_parameter_names(self, dictionary: DataDictionary) -> None:
        manifest = build_manifest(dictionary, [2014, 2015], ["A01", "A02"])
        names = manifest.parameter_names()
        assert len(names) == manifest.n_params
        assert names[manifest.n_fixed] == "gamma[2014]"
        assert names[-3] == "delta[A02]"
        assert names[-2:] == ["log_sigma_gamma", "log_sigma_delta"]

    def test_dump_and_load(self, dictionary: DataDictionary, tmp_path: Path) -> None:
        manifest = build_manifest(dictionary, [2014], ["A01"], definition="awareness_25")
        restored = LayoutManifest.load(manifest.dump(tmp_path / "m" / "layout.json"))
        assert restored == manifest
        assert restored.digest() == manifest.digest()

    def test_digest_tracks_areas(self, dictionary: DataDictionary) -> None:
        one = build_manifest(dictionary, [2014], ["A01"])
        two = build_manifest(dictionary, [2014], ["A01", "A02"])
        assert one.digest() != two.digest()


class TestBuildDesign:
    def test_shapes_and_indices(self, small_design: Design) -> None:
        manifest = small_design.manifest
        assert small_design.n == 72
        assert small_design.X.shape == (72, 8 + N_DUMMIES)
        assert manifest.time_years == [2014, 2015, 2016, 2017]
        assert manifest.area_ids == ["A01", "A02", "A03"]
        assert manifest.definition == "awareness_25"
        assert small_design.latent_matrix.shape == (72, manifest.n_latent)

    def test_its_and_exposure_blocks(self, small_design: Design, small_observations: list[Observation]) -> None:
        for i, obs in enumerate(small_observations):
            row = small_design.row(i)
            if obs.area_id == "A01" and obs.year_index == 2017:
                assert row.its_block == (1.0, 2.0, 1.0, 2.0)
            if obs.area_id == "A03":
                assert row.its_block[2] == 0.0
                assert row.its_block[1] == obs.year_index - 2018
            expected = row.its_block if obs.exposed else (0.0, 0.0, 0.0, 0.0)
            assert row.exposure_block == expected

    def test_confounder_dummies(self, small_design: Design, small_observations: list[Observation]) -> None:
        manifest = small_design.manifest
        male = manifest.column_index("sex[male]")
        decile_3 = manifest.column_index("deprivation_decile[3]")
        for i, obs in enumerate(small_observations):
            assert small_design.X[i, male] == float(obs.confounders.sex == "male")
            assert small_design.X[i, decile_3] == float(obs.area_id == "A03")
        assert small_design.X[:, manifest.column_index("education[below gcse and other]")].sum() == 0.0

    def test_outcomes_weights_and_centering(
        self, small_design: Design, small_observations: list[Observation]
    ) -> None:
        assert np.array_equal(small_design.outcomes, [o.outcome for o in small_observations])
        assert np.allclose(small_design.weights, [o.weight for o in small_observations])
        assert np.array_equal(small_design.centered_year, small_design.X[:, 1].astype(int))

    def test_missing_timeline_raises(
        self,
        make_observation: Callable[..., Observation],
        small_timelines: TimelineSet,
        dictionary: DataDictionary,
    ) -> None:
        with pytest.raises(DataValidationError) as excinfo:
            build_design([make_observation(area_id="Z99")], small_timelines, dictionary)
        assert excinfo.value.issues[0].value == "Z99"

    def test_undeclared_level_raises(
        self,
        make_observation: Callable[..., Observation],
        small_timelines: TimelineSet,
        dictionary: DataDictionary,
    ) -> None:
        obs = make_observation(confounders={"education": "doctorate"})
        with pytest.raises(DataValidationError) as excinfo:
            build_design([obs], small_timelines, dictionary)
        assert (excinfo.value.issues[0].field, excinfo.value.issues[0].value) == ("education", "doctorate")

    def test_prior_only_design(self, small_design: Design) -> None:
        empty = Design.prior_only(small_design.manifest)
        assert empty.n == 0
        assert empty.latent_matrix.shape == (0, small_design.manifest.n_latent)


class TestParameterVector:
    def test_array_round_trip(self, small_design: Design) -> None:
        slices = small_design.slices
        theta = np.arange(slices.size, dtype=float)
        params = ParameterVector.from_array(theta, slices)
        assert params.log_sigma_delta == float(slices.size - 1)
        assert np.array_equal(params.to_array(), theta)

    def test_wrong_length_raises(self, small_design: Design) -> None:
        with pytest.raises(ArtifactError):
            ParameterVector.from_array(np.zeros(3), small_design.slices)

    def test_linear_predictor_row_matches_design(self, small_design: Design) -> None:
        rng = np.random.default_rng(0)
        params = ParameterVector.from_array(rng.standard_normal(small_design.slices.size), small_design.slices)
        full = linear_predictor(params, small_design)
        for i in (0, 17, 71):
            assert linear_predictor(params, small_design.row(i)) == pytest.approx(full[i])

    def test_linear_predictor_rejects_other_layout(self, small_design: Design) -> None:
        params = ParameterVector.zeros(ParameterSlices(2, 1, 1))
        with pytest.raises(ArtifactError):
            linear_predictor(params, small_design)
