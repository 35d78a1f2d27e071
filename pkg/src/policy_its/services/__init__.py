"""Pipeline services: artifact storage, per-definition runs and sensitivity sweeps."""

from policy_its.services.artifact_store import ArtifactStore
from policy_its.services.pipeline import (
    EffectsOutcome,
    FitOutcome,
    PreparedData,
    ValidationOutcome,
    load_inputs,
    run_effects,
    run_fit,
    run_validation,
)
from policy_its.services.sensitivity import SensitivityOutcome, run_sensitivity

__all__ = [
    "ArtifactStore",
    "EffectsOutcome",
    "FitOutcome",
    "PreparedData",
    "SensitivityOutcome",
    "ValidationOutcome",
    "load_inputs",
    "run_effects",
    "run_fit",
    "run_sensitivity",
    "run_validation",
]
