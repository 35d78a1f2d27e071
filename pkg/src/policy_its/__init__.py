"""policy-its: Bayesian hierarchical interrupted time series for staggered policy rollouts.

Typical use::

    from policy_its import RunConfig, load_inputs, run_fit, run_effects, ArtifactStore

Synthetic data for validation::

    from policy_its import get_scenario, simulate, write_dataset
"""

from __future__ import annotations

from policy_its._version import __version__
from policy_its.core.config import RunConfig
from policy_its.core.exceptions import PolicyITSError
from policy_its.effects import EffectsReport, build_report
from policy_its.inference import FittedPosterior, fit_posterior
from policy_its.services import (
    ArtifactStore,
    load_inputs,
    run_effects,
    run_fit,
    run_sensitivity,
    run_validation,
)
from policy_its.synth import get_scenario, simulate, write_dataset

__all__ = [
    "__version__",
    "ArtifactStore",
    "EffectsReport",
    "FittedPosterior",
    "PolicyITSError",
    "RunConfig",
    "build_report",
    "fit_posterior",
    "get_scenario",
    "load_inputs",
    "run_effects",
    "run_fit",
    "run_sensitivity",
    "run_validation",
    "simulate",
    "write_dataset",
]
