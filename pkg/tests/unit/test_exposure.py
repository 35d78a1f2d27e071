"""Tests for exposure derivation and working-age bands."""

from __future__ import annotations

import pytest

from policy_its.cohort.dictionary import EMPLOYMENT_STATUSES, DataDictionary
from policy_its.cohort.exposure import assign_age_band, derive_exposure
from policy_its.core.exceptions import DataValidationError


class TestDeriveExposure:
    def test_unemployed_is_exposed(self) -> None:
        assert derive_exposure("unemployed") == 1

    def test_lifetime_sick_is_excluded(self) -> None:
        assert derive_exposure("life-time sick or disabled") is None

    @pytest.mark.parametrize(
        "status",
        [s for s in EMPLOYMENT_STATUSES if s not in ("unemployed", "life-time sick or disabled")],
    )
    def test_every_other_status_is_control(self, status: str) -> None:
        assert derive_exposure(status) == 0

    def test_fourteen_declared_statuses(self) -> None:
        assert len(EMPLOYMENT_STATUSES) == 14

    def test_unknown_status_raises(self) -> None:
        with pytest.raises(DataValidationError) as excinfo:
            derive_exposure("astronaut")
        assert excinfo.value.issues[0].value == "astronaut"

    def test_custom_dictionary(self) -> None:
        dictionary = DataDictionary(exposed_status="furlough")
        assert derive_exposure("furlough", dictionary) == 1
        assert derive_exposure("unemployed", dictionary) == 0


class TestAgeBand:
    @pytest.mark.parametrize(
        ("age", "band"),
        [(16, "[16,25)"), (24, "[16,25)"), (25, "[25,35)"), (44, "[35,45)"), (54, "[45,55)"), (64, "[55,65)")],
    )
    def test_band_edges(self, age: int, band: str) -> None:
        assert assign_age_band(age) == band

    @pytest.mark.parametrize("age", [15, 65, 80])
    def test_outside_working_age(self, age: int) -> None:
        assert assign_age_band(age) is None

    def test_working_age_range(self, dictionary: DataDictionary) -> None:
        assert dictionary.working_age == (16, 64)
        assert dictionary.age_bands == ["[16,25)", "[25,35)", "[35,45)", "[45,55)", "[55,65)"]
