"""Nested pydantic-settings configuration for a policy-its run.

Every group reads its own ``POLICY_ITS_<GROUP>_*`` env vars, and a whole run
can be described by one JSON file::

    config = RunConfig.from_json_file(Path("configs/desk_null.json"))
    config = config.with_overrides(seed=7, draws=500)
    print(config.config_hash())
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any, Literal

from pydantic import Field, ValidationError, model_validator
from pydantic_settings import BaseSettings

from policy_its.core.exceptions import ConfigError
from policy_its.core.query import ProfileQuery
from policy_its.intervention.models import InterventionDefinition, default_sensitivity_definitions
from policy_its.model.priors import PriorSpec


class InputConfig(BaseSettings):
    """Input file locations.

    Env vars use ``POLICY_ITS_INPUT_`` prefix.
    """

    model_config = {"env_prefix": "POLICY_ITS_INPUT_"}

    cohort_csv: Path = Path("data/cohort.csv")
    rollout_csv: Path = Path("data/rollout.csv")
    areas_csv: Path = Path("data/areas.csv")
    data_dictionary: Path | None = None


class CohortConfig(BaseSettings):
    """Cohort derivation settings.

    Env vars use ``POLICY_ITS_COHORT_`` prefix.
    """

    model_config = {"env_prefix": "POLICY_ITS_COHORT_"}

    use_survey_weights: bool = True
    weight_floor: float = Field(default=0.01, gt=0.0, le=1.0)
    response_covariates: list[str] = Field(
        default_factory=lambda: ["age_band", "sex", "education", "ethnicity"]
    )


class InterventionConfig(BaseSettings):
    """Intervention timing definitions.

    Env vars use ``POLICY_ITS_INTERVENTION_`` prefix.
    """

    model_config = {"env_prefix": "POLICY_ITS_INTERVENTION_"}

    definition: InterventionDefinition = InterventionDefinition(kind="awareness", pct=25.0)
    sensitivity: list[InterventionDefinition] = Field(default_factory=default_sensitivity_definitions)


class PriorConfig(BaseSettings):
    """Prior settings.

    Env vars use ``POLICY_ITS_PRIOR_`` prefix.
    """

    model_config = {"env_prefix": "POLICY_ITS_PRIOR_"}

    fixed_effect_variance: float = Field(default=1000.0, gt=0.0)
    intercept_variance: float | None = None
    pc_upper: float = Field(default=1.0, gt=0.0)
    pc_alpha: float = Field(default=0.1, gt=0.0, lt=1.0)
    sum_to_zero_precision: float = Field(default=1e6, gt=0.0)

    def to_spec(self) -> PriorSpec:
        return PriorSpec(
            fixed_effect_variance=self.fixed_effect_variance,
            intercept_variance=self.intercept_variance,
            pc_upper=self.pc_upper,
            pc_alpha=self.pc_alpha,
            sum_to_zero_precision=self.sum_to_zero_precision,
        )


class InferenceConfig(BaseSettings):
    """MAP + Laplace fitting, posterior draws and the MCMC oracle.

    Env vars use ``POLICY_ITS_INFERENCE_`` prefix.
    """

    model_config = {"env_prefix": "POLICY_ITS_INFERENCE_"}

    seed: int = 20240101
    n_draws: int = Field(default=1000, ge=0)
    grid_size: int = Field(default=5, ge=1)
    grid_spacing: float = Field(default=0.5, gt=0.0)
    log_sigma_lower: float = -4.0
    log_sigma_upper: float = 3.0
    newton_tol: float = Field(default=1e-8, gt=0.0)
    newton_max_iter: int = Field(default=200, ge=1)
    max_workers: int = Field(default=1, ge=1)
    gradient_check_points: int = Field(default=20, ge=1)
    mcmc_chains: int = Field(default=4, ge=2)
    mcmc_iterations: int = Field(default=20_000, ge=100)
    mcmc_burn_in_fraction: float = Field(default=0.5, ge=0.0, lt=1.0)
    rhat_threshold: float = Field(default=1.05, gt=1.0)
    oracle_tolerance_sd: float = Field(default=0.1, gt=0.0)

    @model_validator(mode="after")
    def _check_bounds(self) -> InferenceConfig:
        if self.log_sigma_lower >= self.log_sigma_upper:
            raise ValueError("log_sigma_lower must be below log_sigma_upper")
        return self


class EffectsConfig(BaseSettings):
    """Effect marginalization and reporting.

    Env vars use ``POLICY_ITS_EFFECTS_`` prefix.
    """

    model_config = {"env_prefix": "POLICY_ITS_EFFECTS_"}

    aggregation: Literal["linear_predictor", "probability"] = "linear_predictor"
    adjustment: Literal["multiplicative", "additive"] = "multiplicative"
    credible_level: float = Field(default=0.95, gt=0.0, lt=1.0)
    top_k: int = Field(default=5, ge=1)
    individual_dimensions: list[str] = Field(
        default_factory=lambda: ["age_band", "education", "ethnicity", "marital_status", "sex"]
    )
    community_dimensions: list[str] = Field(
        default_factory=lambda: ["deprivation_decile", "ethnic_mix_quintile"]
    )
    # Named ad-hoc profiles (year range, area set, levels, exposure group), reported in query_rho.
    queries: dict[str, ProfileQuery] = Field(default_factory=dict)


class SynthConfig(BaseSettings):
    """Synthetic scenario selection.

    Env vars use ``POLICY_ITS_SYNTH_`` prefix.
    """

    model_config = {"env_prefix": "POLICY_ITS_SYNTH_"}

    scenario: str = "NULL"
    seed: int | None = None
    overrides: dict[str, Any] = Field(default_factory=dict)


class OutputConfig(BaseSettings):
    """Output location.

    Env vars use ``POLICY_ITS_OUTPUT_`` prefix.
    """

    model_config = {"env_prefix": "POLICY_ITS_OUTPUT_"}

    out_dir: Path = Path("./out")


class PersistenceConfig(BaseSettings):
    """Fit artifact persistence.

    Env vars use ``POLICY_ITS_PERSISTENCE_`` prefix.
    """

    model_config = {"env_prefix": "POLICY_ITS_PERSISTENCE_"}

    backend: Literal["file", "memory"] = "file"
    artifact_dir: Path | None = None


class ObservabilityConfig(BaseSettings):
    """Logging configuration.

    Env vars use ``POLICY_ITS_OBSERVABILITY_`` prefix.
    """

    model_config = {"env_prefix": "POLICY_ITS_OBSERVABILITY_"}

    log_level: str = "INFO"
    json_logs: bool | None = None


# Groups that do not change results and therefore stay out of the config hash.
_UNHASHED_GROUPS = ("output", "persistence", "observability")


class RunConfig(BaseSettings):
    """Top-level settings aggregating all sub-configs.

    Each sub-config reads its own ``POLICY_ITS_<GROUP>_*`` env vars; a JSON
    config file supplies any subset of groups.
    """

    inputs: InputConfig = InputConfig()
    cohort: CohortConfig = CohortConfig()
    intervention: InterventionConfig = InterventionConfig()
    prior: PriorConfig = PriorConfig()
    inference: InferenceConfig = InferenceConfig()
    effects: EffectsConfig = EffectsConfig()
    synth: SynthConfig = SynthConfig()
    output: OutputConfig = OutputConfig()
    persistence: PersistenceConfig = PersistenceConfig()
    observability: ObservabilityConfig = ObservabilityConfig()

    @classmethod
    def from_json_file(cls, path: Path) -> RunConfig:
        """Load and validate a config file; relative paths resolve against its directory."""
        if not path.is_file():
            raise ConfigError(f"Config file not found: {path}")
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"Config file {path} is not valid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError(f"Expected a JSON object in {path}")
        try:
            config = cls(**raw)
        except ValidationError as exc:
            raise ConfigError(f"Invalid config {path}: {exc}") from exc
        return config._resolve_relative(path.parent)

    def _resolve_relative(self, base: Path) -> RunConfig:
        def _resolve(p: Path | None) -> Path | None:
            if p is None or p.is_absolute():
                return p
            return base / p

        inputs = self.inputs.model_copy(
            update={
                "cohort_csv": _resolve(self.inputs.cohort_csv),
                "rollout_csv": _resolve(self.inputs.rollout_csv),
                "areas_csv": _resolve(self.inputs.areas_csv),
                "data_dictionary": _resolve(self.inputs.data_dictionary),
            }
        )
        output = self.output.model_copy(update={"out_dir": _resolve(self.output.out_dir)})
        persistence = self.persistence.model_copy(update={"artifact_dir": _resolve(self.persistence.artifact_dir)})
        return self.model_copy(update={"inputs": inputs, "output": output, "persistence": persistence})

    def with_overrides(
        self,
        *,
        seed: int | None = None,
        draws: int | None = None,
        threshold_pct: float | None = None,
        out: Path | None = None,
    ) -> RunConfig:
        """Apply CLI flag overrides, returning a new config."""
        update: dict[str, Any] = {}
        if seed is not None:
            update["inference"] = self.inference.model_copy(update={"seed": seed})
            update["synth"] = self.synth.model_copy(update={"seed": seed})
        if draws is not None:
            if draws < 0:
                raise ConfigError("--draws must be non-negative")
            inference = update.get("inference", self.inference)
            update["inference"] = inference.model_copy(update={"n_draws": draws})
        if threshold_pct is not None:
            try:
                definition = InterventionDefinition(kind="awareness", pct=threshold_pct)
            except ValidationError as exc:
                raise ConfigError(f"Invalid --threshold-pct: {exc}") from exc
            update["intervention"] = self.intervention.model_copy(update={"definition": definition})
        if out is not None:
            update["output"] = self.output.model_copy(update={"out_dir": out})
        return self.model_copy(update=update)

    def hashed_payload(self) -> dict[str, Any]:
        payload = self.model_dump(mode="json")
        for group in _UNHASHED_GROUPS:
            payload.pop(group, None)
        # Input locations differ between machines; contents are what matter.
        payload.pop("inputs", None)
        return payload

    def config_hash(self) -> str:
        """sha256 over the canonical JSON of every result-affecting setting."""
        canonical = json.dumps(self.hashed_payload(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    @property
    def artifact_dir(self) -> Path:
        return self.persistence.artifact_dir or self.output.out_dir / "artifacts"
