"""Synthetic scenarios with known truth, written in the ingestion schemas."""

from policy_its.synth.scenarios import ScenarioConfig, get_scenario, scenario_library
from policy_its.synth.simulate import GroundTruth, SyntheticDataset, TrueEffects, simulate, true_effects
from policy_its.synth.writer import DATASET_FILES, read_truth, write_dataset

__all__ = [
    "DATASET_FILES",
    "GroundTruth",
    "ScenarioConfig",
    "SyntheticDataset",
    "TrueEffects",
    "get_scenario",
    "read_truth",
    "scenario_library",
    "simulate",
    "true_effects",
    "write_dataset",
]
