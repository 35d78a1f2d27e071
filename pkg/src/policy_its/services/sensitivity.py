"""Sensitivity of the results to the intervention definition.

One full fit per definition (the awareness year changes the regressors), each
written to its own subdirectory, then trend and rho tables aligned on
centered year side by side. Definitions run in a process pool when
``inference.max_workers > 1``; results are collected in definition order.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from policy_its.core.config import RunConfig
from policy_its.effects.models import EffectSummary, TemporalRow
from policy_its.formatters.csv_formatter import CSVFormatter
from policy_its.formatters.protocols import OutputMetadata, ResultTable
from policy_its.formatters.rows import interval_columns
from policy_its.hooks.run_tracker import track_stage
from policy_its.intervention.models import InterventionDefinition
from policy_its.persistence import create_backend
from policy_its.services.artifact_store import ArtifactStore
from policy_its.services.pipeline import PreparedData, fit_or_load, load_inputs, run_effects

log = logging.getLogger(__name__)


@dataclass
class DefinitionResult:
    """What the comparison tables need from one definition's run."""

    label: str
    temporal: list[TemporalRow]
    national: EffectSummary
    never_aware: int
    out_dir: Path
    config_hash: str = ""
    seed: int = 0


@dataclass
class SensitivityOutcome:
    results: list[DefinitionResult]
    paths: list[Path] = field(default_factory=list)


def run_definition(
    config: RunConfig,
    definition: InterventionDefinition,
    data: PreparedData | None = None,
) -> DefinitionResult:
    """Fit (or reuse) and report one definition into ``<out>/<label>/``."""
    data = data or load_inputs(config)
    store = ArtifactStore(create_backend(config.persistence, config.artifact_dir))
    out_dir = config.output.out_dir / definition.label
    fitted, design, timelines = fit_or_load(config, data, definition, store, out_dir)
    outcome = run_effects(
        config, data, definition, store, out_dir, fitted=fitted, design=design, timelines=timelines
    )
    return DefinitionResult(
        label=definition.label,
        temporal=outcome.report.temporal,
        national=outcome.report.national,
        never_aware=outcome.never_aware,
        out_dir=out_dir,
        config_hash=fitted.config_hash,
        seed=fitted.seed,
    )


def _job(payload: tuple[str, str]) -> DefinitionResult:
    config_json, definition_json = payload
    config = RunConfig.model_validate_json(config_json)
    definition = InterventionDefinition.model_validate_json(definition_json)
    return run_definition(config, definition)


# ── Aligned tables ───────────────────────────────────────────────────


def trend_rows(results: Sequence[DefinitionResult]) -> list[dict[str, Any]]:
    """One row per centered year; per definition, exposed and control prevalence."""
    by_label = {r.label: {row.year: row for row in r.temporal if row.year is not None} for r in results}
    years = sorted({year for rows in by_label.values() for year in rows})
    table = []
    for year in years:
        row: dict[str, Any] = {"centered_year": year}
        for r in results:
            entry = by_label[r.label].get(year)
            exposed = interval_columns(f"{r.label}_exposed", entry.prevalence_exposed if entry else None)
            control = interval_columns(f"{r.label}_control", entry.prevalence_control if entry else None)
            row.update(exposed)
            row.update(control)
        table.append(row)
    return table


def rho_rows(results: Sequence[DefinitionResult]) -> list[dict[str, Any]]:
    """National rho per definition, one row each, in definition order."""
    rows = []
    for r in results:
        row: dict[str, Any] = {
            "definition": r.label,
            "status": r.national.status.upper(),
            "reason": r.national.reason,
            "never_aware_areas": r.never_aware,
        }
        row.update(interval_columns("rho", r.national.rho))
        row.update(interval_columns("ratio", r.national.ratio))
        rows.append(row)
    return rows


# ── Entry point ──────────────────────────────────────────────────────


def run_sensitivity(
    config: RunConfig,
    definitions: Sequence[InterventionDefinition] | None = None,
) -> SensitivityOutcome:
    """Run every definition and write ``sensitivity_trend.csv`` and ``sensitivity_rho.csv``."""
    definitions = list(definitions or config.intervention.sensitivity)
    labels = [d.label for d in definitions]
    log.info("Sensitivity sweep over %d definitions: %s", len(definitions), ", ".join(labels))

    with track_stage("sensitivity") as stage:
        workers = min(config.inference.max_workers, len(definitions))
        if workers > 1:
            payloads = [(config.model_dump_json(), d.model_dump_json()) for d in definitions]
            with ProcessPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(_job, payloads))
        else:
            data = load_inputs(config)
            results = [run_definition(config, d, data) for d in definitions]
        stage.items = len(results)

    metadata = OutputMetadata(
        config_hash=config.config_hash(),
        seed=config.inference.seed,
        manifest_path="<definition>/layout_manifest.json",
        definition=",".join(labels),
        settings={"aggregation": config.effects.aggregation, "adjustment": config.effects.adjustment},
    )
    out_dir = config.output.out_dir
    csv = CSVFormatter()
    tables = [
        ResultTable("sensitivity_trend", metadata, trend_rows(results)),
        ResultTable("sensitivity_rho", metadata, rho_rows(results)),
    ]
    paths = [csv.format_to_file(t, out_dir / f"{t.name}{csv.extension}") for t in tables]
    log.info("Sensitivity tables written to %s", out_dir)
    return SensitivityOutcome(results=results, paths=paths)
