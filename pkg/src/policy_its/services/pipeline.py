"""Pipeline orchestration: ingest -> timelines -> design -> fit -> effects.

Each CLI command is a thin wrapper around one function here::

    data = load_inputs(config)
    fit = run_fit(config, data, config.intervention.definition, store)
    outcome = run_effects(config, data, config.intervention.definition, store, config.output.out_dir)

Stages are timed through ``run_tracker``; the fit artifact is reused by
``run_effects`` without refitting, after checking that it was computed from
the same layout and the same input bytes.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import structlog

from policy_its.cohort.build import build_cohort
from policy_its.cohort.dictionary import DataDictionary
from policy_its.cohort.ingest import read_areas_csv, read_cohort_csv
from policy_its.cohort.models import AreaAttributes, CohortBuild, RawResponse
from policy_its.cohort.summary import describe_cohort
from policy_its.core.config import RunConfig
from policy_its.core.exceptions import ArtifactError, OracleDisagreementError, PolicyITSError
from policy_its.effects.frame import AnalysisFrame
from policy_its.effects.report import EffectsReport, build_report
from policy_its.formatters.csv_formatter import CSVFormatter
from policy_its.formatters.json_formatter import JSONFormatter
from policy_its.formatters.protocols import OutputMetadata, ResultTable
from policy_its.formatters.rows import effect_row, interval_columns, temporal_row
from policy_its.hooks.run_tracker import track_stage
from policy_its.inference.fitted import FittedPosterior, fit_posterior
from policy_its.inference.mcmc import mcmc_oracle
from policy_its.inference.oracle import GradientCheck, OracleComparison, check_gradient, compare_with_oracle
from policy_its.intervention.ingest import read_rollout_csv
from policy_its.intervention.models import InterventionDefinition, RolloutSeries
from policy_its.intervention.timeline import TimelineSet, build_timelines
from policy_its.model.design import Design, build_design
from policy_its.model.posterior import PosteriorTarget
from policy_its.services.artifact_store import ArtifactStore

log = logging.getLogger(__name__)

MANIFEST_FILE = "layout_manifest.json"


# ── Inputs ───────────────────────────────────────────────────────────


@dataclass
class PreparedData:
    """Ingested inputs and the derived cohort, shared by every definition."""

    dictionary: DataDictionary
    raw: list[RawResponse]
    areas: list[AreaAttributes]
    rollout: list[RolloutSeries]
    cohort: CohortBuild
    data_hash: str

    @property
    def window(self) -> tuple[int, int]:
        return self.dictionary.study_start, self.dictionary.study_end


def input_hash(paths: list[Path], dictionary: DataDictionary) -> str:
    """sha256 over the input file bytes and the canonical data dictionary."""
    digest = hashlib.sha256()
    for path in paths:
        digest.update(path.read_bytes())
        digest.update(b"\x00")
    digest.update(dictionary.model_dump_json().encode("utf-8"))
    return digest.hexdigest()


def load_inputs(config: RunConfig) -> PreparedData:
    """Read the three CSVs and build the cohort."""
    inputs = config.inputs
    with track_stage("ingest") as stage:
        dictionary = DataDictionary.load(inputs.data_dictionary)
        raw = read_cohort_csv(inputs.cohort_csv, dictionary)
        areas = read_areas_csv(inputs.areas_csv)
        rollout = read_rollout_csv(inputs.rollout_csv)
        cohort = build_cohort(raw, areas, dictionary, config.cohort, source=str(inputs.cohort_csv))
        stage.items = len(cohort.observations)
    summary = describe_cohort(cohort.observations)
    log.info(
        "Cohort: %d observations, %d persons, %d areas, prevalence %.3f",
        summary.n_observations,
        summary.n_persons,
        summary.n_areas,
        summary.outcome_prevalence,
    )
    data_hash = input_hash([inputs.cohort_csv, inputs.rollout_csv, inputs.areas_csv], dictionary)
    return PreparedData(
        dictionary=dictionary, raw=raw, areas=areas, rollout=rollout, cohort=cohort, data_hash=data_hash
    )


def prepare_design(
    config: RunConfig,
    data: PreparedData,
    definition: InterventionDefinition,
) -> tuple[TimelineSet, Design]:
    with track_stage("timelines") as stage:
        timelines = build_timelines(data.rollout, definition, data.window)
        stage.items = len(timelines.timelines)
        design = build_design(data.cohort.observations, timelines, data.dictionary, config.prior.to_spec())
    return timelines, design


def definition_config(config: RunConfig, definition: InterventionDefinition) -> RunConfig:
    """*config* with *definition* as the active intervention definition."""
    return config.model_copy(update={"intervention": config.intervention.model_copy(update={"definition": definition})})


# ── Fit ──────────────────────────────────────────────────────────────


@dataclass
class FitOutcome:
    fitted: FittedPosterior
    design: Design
    timelines: TimelineSet
    location: str
    manifest_path: Path


def run_fit(
    config: RunConfig,
    data: PreparedData,
    definition: InterventionDefinition,
    store: ArtifactStore,
    out_dir: Path | None = None,
) -> FitOutcome:
    """Fit one definition, store the artifact and emit its layout manifest."""
    structlog.contextvars.bind_contextvars(definition=definition.label)
    scoped = definition_config(config, definition)
    timelines, design = prepare_design(scoped, data, definition)
    with track_stage("fit") as stage:
        fitted = fit_posterior(
            design,
            scoped.prior.to_spec(),
            scoped.inference,
            config_hash=scoped.config_hash(),
            data_hash=data.data_hash,
        )
        stage.items = fitted.n_draws
    out_dir = out_dir or config.output.out_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest_path = design.manifest.dump(out_dir / f"{definition.label}.{MANIFEST_FILE}")
    with track_stage("write"):
        location = store.save(fitted)
    return FitOutcome(
        fitted=fitted, design=design, timelines=timelines, location=location, manifest_path=manifest_path
    )


def load_fit(
    config: RunConfig,
    data: PreparedData,
    definition: InterventionDefinition,
    store: ArtifactStore,
    design: Design,
) -> FittedPosterior:
    """Stored fit for *definition*, checked against the current layout and inputs."""
    fitted = store.load(definition.label)
    fitted.check_manifest(design.manifest)
    if fitted.data_hash and fitted.data_hash != data.data_hash:
        raise ArtifactError(
            f"Fit artifact {definition.label!r} was computed from different input files; refit required"
        )
    expected = definition_config(config, definition).config_hash()
    if fitted.config_hash and fitted.config_hash != expected:
        log.warning("Fit artifact %s was produced under a different config hash", definition.label)
    return fitted


def fit_or_load(
    config: RunConfig,
    data: PreparedData,
    definition: InterventionDefinition,
    store: ArtifactStore,
    out_dir: Path,
) -> tuple[FittedPosterior, Design, TimelineSet]:
    """Reuse a matching stored fit, otherwise fit and store."""
    if store.exists(definition.label):
        timelines, design = prepare_design(definition_config(config, definition), data, definition)
        try:
            fitted = load_fit(config, data, definition, store, design)
        except ArtifactError as exc:
            log.info("Refitting %s: %s", definition.label, exc)
        else:
            if fitted.config_hash == definition_config(config, definition).config_hash():
                return fitted, design, timelines
    outcome = run_fit(config, data, definition, store, out_dir)
    return outcome.fitted, outcome.design, outcome.timelines


# ── Effects ──────────────────────────────────────────────────────────


@dataclass
class EffectsOutcome:
    report: EffectsReport
    paths: list[Path] = field(default_factory=list)
    never_aware: int = 0


def output_metadata(config: RunConfig, fitted: FittedPosterior, settings: dict[str, Any]) -> OutputMetadata:
    return OutputMetadata(
        config_hash=fitted.config_hash or config.config_hash(),
        seed=fitted.seed,
        manifest_digest=fitted.manifest.digest(),
        manifest_path=MANIFEST_FILE,
        definition=fitted.manifest.definition,
        settings=settings,
    )


def report_tables(report: EffectsReport, metadata: OutputMetadata) -> dict[str, ResultTable]:
    """Every effects output as a named table."""
    confounder_rows = [
        effect_row(c, {"dimension": t.name, "level": c.cell[t.dimensions[0]]})
        for t in report.confounders
        for c in t.cells
    ]
    joint_rows = [
        effect_row(
            c,
            {
                "community_dimension": t.dimensions[0],
                "community_level": c.cell[t.dimensions[0]],
                "individual_dimension": t.dimensions[1],
                "individual_level": c.cell[t.dimensions[1]],
            },
        )
        for t in report.joint
        for c in t.cells
    ]
    ranked_rows = [
        {"group": group, "rank": rank + 1, "profile": c.label, **effect_row(c)}
        for group, cells in (("top", report.top), ("bottom", report.bottom))
        for rank, c in enumerate(cells)
    ]
    tables = {
        "temporal_profile": ResultTable("temporal_profile", metadata, [temporal_row(r) for r in report.temporal]),
        "national_rho": ResultTable("national_rho", metadata, payload={"national": effect_row(report.national)}),
        "area_rho": ResultTable("area_rho", metadata, [effect_row(c) for c in report.area.cells]),
        "confounder_rho": ResultTable("confounder_rho", metadata, confounder_rows),
        "joint_rho": ResultTable("joint_rho", metadata, joint_rows),
        "top_bottom_profiles": ResultTable("top_bottom_profiles", metadata, ranked_rows),
        "plot_data": ResultTable("plot_data", metadata, payload=report.plot_data()),
    }
    if report.queries:
        query_rows = [
            {
                "query": q.name,
                "description": q.query.describe(),
                "n_selected": q.n_selected,
                **interval_columns("selection_prevalence", q.prevalence),
                **effect_row(q.change, {}),
            }
            for q in report.queries
        ]
        tables["query_rho"] = ResultTable("query_rho", metadata, query_rows)
    return tables


_JSON_ONLY = ("national_rho", "plot_data")


def write_tables(tables: dict[str, ResultTable], out_dir: Path) -> list[Path]:
    """CSV and JSON for row tables, JSON only for payloads."""
    out_dir.mkdir(parents=True, exist_ok=True)
    csv, js = CSVFormatter(), JSONFormatter()
    paths = []
    for name, table in tables.items():
        paths.append(js.format_to_file(table, out_dir / f"{name}{js.extension}"))
        if name not in _JSON_ONLY:
            paths.append(csv.format_to_file(table, out_dir / f"{name}{csv.extension}"))
    return paths


def compute_effects(config: RunConfig, fitted: FittedPosterior, design: Design, data: PreparedData) -> EffectsReport:
    if fitted.n_draws == 0:
        log.warning("Fit %s has no posterior draws; every effect cell will be EMPTY", fitted.manifest.definition)
    with track_stage("effects") as stage:
        frame = AnalysisFrame.from_design(design, data.cohort.observations)
        report = build_report(fitted.latent_draws(), frame, config.effects)
        stage.items = len(report.area.cells)
    return report


def run_effects(
    config: RunConfig,
    data: PreparedData,
    definition: InterventionDefinition,
    store: ArtifactStore,
    out_dir: Path,
    *,
    fitted: FittedPosterior | None = None,
    design: Design | None = None,
    timelines: TimelineSet | None = None,
) -> EffectsOutcome:
    """Effects tables and plot data for one definition, from its stored fit."""
    structlog.contextvars.bind_contextvars(definition=definition.label)
    if design is None or timelines is None:
        timelines, design = prepare_design(definition_config(config, definition), data, definition)
    if fitted is None:
        fitted = load_fit(config, data, definition, store, design)
    report = compute_effects(config, fitted, design, data)
    metadata = output_metadata(
        config,
        fitted,
        {**report.settings, "n_draws": fitted.n_draws, "never_aware_areas": len(timelines.never_aware)},
    )
    with track_stage("write"):
        out_dir.mkdir(parents=True, exist_ok=True)
        fitted.manifest.dump(out_dir / MANIFEST_FILE)
        paths = write_tables(report_tables(report, metadata), out_dir)
    log.info("Wrote %d effects files for %s to %s", len(paths), definition.label, out_dir)
    return EffectsOutcome(report=report, paths=paths, never_aware=len(timelines.never_aware))


# ── Validate ─────────────────────────────────────────────────────────


@dataclass
class ValidationOutcome:
    gradient: GradientCheck
    comparison: OracleComparison | None
    report_path: Path
    error: PolicyITSError | None = None


def run_validation(config: RunConfig, data: PreparedData, out_dir: Path) -> ValidationOutcome:
    """Gradient check, fit, MCMC oracle and comparison.

    The report is written before any failure is returned in ``error``.
    """
    definition = config.intervention.definition
    inference = config.inference
    _, design = prepare_design(config, data, definition)
    target = PosteriorTarget(design, config.prior.to_spec())
    with track_stage("gradient_check"):
        gradient = check_gradient(target, points=inference.gradient_check_points, seed=inference.seed)
    with track_stage("fit"):
        fitted = fit_posterior(design, config.prior.to_spec(), inference, config_hash=config.config_hash())
    assert fitted.hyper is not None

    comparison: OracleComparison | None = None
    error: PolicyITSError | None = None
    if not gradient.passed():
        error = OracleDisagreementError(
            f"Analytic gradient differs from finite differences (relative error {gradient.max_relative_error:.3g})",
            {gradient.worst_parameter: gradient.max_relative_error},
        )
    else:
        with track_stage("mcmc") as stage:
            mcmc = mcmc_oracle(
                target,
                fitted.hyper.optimum,
                chains=inference.mcmc_chains,
                iterations=inference.mcmc_iterations,
                burn_in_fraction=inference.mcmc_burn_in_fraction,
                seed=inference.seed,
                max_workers=inference.max_workers,
            )
            stage.items = int(mcmc.samples.shape[0] * mcmc.samples.shape[1])
        try:
            comparison = compare_with_oracle(
                fitted, mcmc, tolerance_sd=inference.oracle_tolerance_sd, rhat_threshold=inference.rhat_threshold
            )
        except PolicyITSError as exc:
            error = exc

    out_dir.mkdir(parents=True, exist_ok=True)
    payload: dict[str, Any] = {
        "definition": definition.label,
        "gradient_check": {
            "points": gradient.points,
            "max_relative_error": gradient.max_relative_error,
            "worst_parameter": gradient.worst_parameter,
            "passed": gradient.passed(),
        },
        "oracle": comparison.rows() if comparison is not None else None,
        "max_rhat": comparison.max_rhat if comparison is not None else None,
        "error": None if error is None else {"type": type(error).__name__, "message": str(error)},
    }
    if error is not None and hasattr(error, "offenders"):
        payload["offenders"] = error.offenders
    if error is not None and hasattr(error, "rhat"):
        payload["unconverged"] = error.rhat
    metadata = output_metadata(config, fitted, {"tolerance_sd": inference.oracle_tolerance_sd})
    table = ResultTable("validation", metadata, payload=payload)
    path = JSONFormatter().format_to_file(table, out_dir / "validation.json")
    log.info("Validation report written to %s", path)
    return ValidationOutcome(gradient=gradient, comparison=comparison, report_path=path, error=error)


def config_snapshot(config: RunConfig, path: Path) -> Path:
    """Write the effective configuration next to the outputs."""
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(config.model_dump(mode="json"), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path
