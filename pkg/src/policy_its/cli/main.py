"""CLI for policy-its: simulate / fit / effects / sensitivity / validate.

Exit codes: 0 ok, 2 validation or configuration error, 3 numerical or
convergence failure, 4 oracle disagreement.
"""

from __future__ import annotations

from collections.abc import Callable
from pathlib import Path
from typing import Optional, TypeVar

import typer
from rich.console import Console
from rich.table import Table

from policy_its._version import __version__
from policy_its.cohort.dictionary import DataDictionary
from policy_its.core.config import RunConfig
from policy_its.core.exceptions import PolicyITSError
from policy_its.effects.models import EffectSummary, Interval
from policy_its.hooks.logging_config import setup_logging
from policy_its.hooks.run_tracker import end_run, start_run, track_stage
from policy_its.persistence import create_backend
from policy_its.services.artifact_store import ArtifactStore
from policy_its.services.pipeline import config_snapshot, load_inputs, run_effects, run_fit, run_validation
from policy_its.services.sensitivity import run_sensitivity
from policy_its.synth.scenarios import get_scenario
from policy_its.synth.simulate import simulate as simulate_dataset
from policy_its.synth.simulate import true_effects
from policy_its.synth.writer import write_dataset

app = typer.Typer(name="policy-its", help="Bayesian hierarchical interrupted time series for staggered policy rollouts")
console = Console(stderr=True)

T = TypeVar("T")

ConfigOption = typer.Option(None, "--config", "-c", help="Run configuration JSON file")
SeedOption = typer.Option(None, "--seed", help="Override the random seed")
DrawsOption = typer.Option(None, "--draws", help="Override the number of posterior draws")
ThresholdOption = typer.Option(None, "--threshold-pct", help="Use awareness at this percentage as the definition")
OutOption = typer.Option(None, "--out", help="Override the output directory")


def _load_config(
    config_path: Optional[Path],
    seed: Optional[int],
    draws: Optional[int],
    threshold_pct: Optional[float],
    out: Optional[Path],
) -> RunConfig:
    config = RunConfig.from_json_file(config_path) if config_path is not None else RunConfig()
    return config.with_overrides(seed=seed, draws=draws, threshold_pct=threshold_pct, out=out)


def _run(label: str, body: Callable[[], T]) -> T:
    """Run *body* inside a tracked run; map policy-its errors onto exit codes."""
    start_run(label=label)
    try:
        return body()
    except PolicyITSError as exc:
        console.print(f"[red]{type(exc).__name__}:[/red] {exc}")
        raise typer.Exit(code=exc.exit_code) from exc
    finally:
        end_run()


def _fmt(interval: Interval | None, pct: bool = False) -> str:
    if interval is None:
        return "EMPTY"
    scale = 100.0 if pct else 1.0
    unit = "%" if pct else ""
    return (
        f"{interval.median * scale:.2f}{unit} "
        f"({interval.lower * scale:.2f}{unit} to {interval.upper * scale:.2f}{unit})"
    )


def _national_table(title: str, rows: list[tuple[str, EffectSummary]]) -> Table:
    table = Table(title=title)
    table.add_column("Definition", style="cyan")
    table.add_column("rho (95% CrI)")
    table.add_column("Exposed prevalence")
    table.add_column("Control prevalence")
    table.add_column("Status")
    for label, summary in rows:
        table.add_row(
            label,
            _fmt(summary.rho, pct=True),
            _fmt(summary.prevalence_exposed, pct=True),
            _fmt(summary.prevalence_control, pct=True),
            summary.status.upper() if summary.reason is None else f"{summary.status.upper()}: {summary.reason}",
        )
    return table


@app.callback()
def main(
    log_level: str = typer.Option("INFO", "--log-level", help="Logging level"),
    json_logs: Optional[bool] = typer.Option(None, "--json-logs/--console-logs", help="Force the log renderer"),
) -> None:
    """Configure logging before any command runs."""
    from policy_its.core.config import ObservabilityConfig

    setup_logging(ObservabilityConfig(log_level=log_level, json_logs=json_logs))


@app.command()
def version() -> None:
    """Print the engine version."""
    typer.echo(__version__)


@app.command("simulate")
def simulate_cmd(
    config_path: Optional[Path] = ConfigOption,
    scenario: Optional[str] = typer.Option(None, "--scenario", help="NULL, PAPER-LIKE or HETEROGENEOUS"),
    seed: Optional[int] = SeedOption,
    out: Optional[Path] = OutOption,
) -> None:
    """Generate a synthetic dataset (cohort, rollout, areas, truth).

    Files land in ``--out`` when given, otherwise next to the configured cohort CSV
    so a following ``fit`` with the same config reads them.
    """

    def body() -> None:
        config = _load_config(config_path, seed, None, None, None)
        synth = config.synth
        name = scenario or synth.scenario
        chosen = get_scenario(name, synth.seed if synth.seed is not None else config.inference.seed, synth.overrides)
        data_dir = out if out is not None else config.inputs.cohort_csv.parent
        with track_stage("simulate") as stage:
            dataset = simulate_dataset(chosen, DataDictionary.load(config.inputs.data_dictionary))
            stage.items = len(dataset.records)
        with track_stage("write"):
            paths = write_dataset(dataset, data_dir)
        truth = true_effects(dataset.truth, config.effects.adjustment)
        console.print(f"[green]Scenario {name}: {len(dataset.records)} rows written to {data_dir}[/green]")
        for path in paths.values():
            console.print(f"  {path}")
        if truth.national_rho is not None:
            console.print(f"True national rho: {truth.national_rho * 100:.2f}%")

    _run("simulate", body)


@app.command()
def fit(
    config_path: Optional[Path] = ConfigOption,
    seed: Optional[int] = SeedOption,
    draws: Optional[int] = DrawsOption,
    threshold_pct: Optional[float] = ThresholdOption,
    out: Optional[Path] = OutOption,
) -> None:
    """Fit the model for the configured intervention definition and store the artifact."""

    def body() -> None:
        config = _load_config(config_path, seed, draws, threshold_pct, out)
        store = ArtifactStore(create_backend(config.persistence, config.artifact_dir))
        data = load_inputs(config)
        outcome = run_fit(config, data, config.intervention.definition, store)
        config_snapshot(config, config.output.out_dir / "run_config.json")
        optimum = outcome.fitted.diagnostics
        console.print(f"[green]Fit {config.intervention.definition.label} stored at {outcome.location}[/green]")
        console.print(
            f"  {outcome.fitted.n_draws} draws, {len(outcome.fitted.grid)} grid points, "
            f"optimizer {optimum.get('optimizer_method')} in {optimum.get('optimizer_iterations')} iterations, "
            f"{len(outcome.timelines.never_aware)} never-aware areas"
        )

    _run("fit", body)


@app.command()
def effects(
    config_path: Optional[Path] = ConfigOption,
    seed: Optional[int] = SeedOption,
    draws: Optional[int] = DrawsOption,
    threshold_pct: Optional[float] = ThresholdOption,
    out: Optional[Path] = OutOption,
    artifact_dir: Optional[Path] = typer.Option(None, "--artifact-dir", help="Where the fit artifact is stored"),
) -> None:
    """Report tables and plot data from a stored fit (no refitting)."""

    def body() -> None:
        config = _load_config(config_path, seed, draws, threshold_pct, out)
        if artifact_dir is not None:
            config = config.model_copy(
                update={"persistence": config.persistence.model_copy(update={"artifact_dir": artifact_dir})}
            )
        store = ArtifactStore(create_backend(config.persistence, config.artifact_dir))
        data = load_inputs(config)
        definition = config.intervention.definition
        outcome = run_effects(config, data, definition, store, config.output.out_dir)
        console.print(_national_table("National standardised change", [(definition.label, outcome.report.national)]))
        empty = outcome.report.area.empty()
        console.print(f"{len(outcome.paths)} files written to {config.output.out_dir}; {len(empty)} EMPTY areas")

    _run("effects", body)


@app.command()
def sensitivity(
    config_path: Optional[Path] = ConfigOption,
    seed: Optional[int] = SeedOption,
    draws: Optional[int] = DrawsOption,
    out: Optional[Path] = OutOption,
) -> None:
    """Fit and report every sensitivity definition, then align the results."""

    def body() -> None:
        config = _load_config(config_path, seed, draws, None, out)
        outcome = run_sensitivity(config)
        console.print(_national_table("Sensitivity to the intervention definition", [
            (r.label, r.national) for r in outcome.results
        ]))
        for path in outcome.paths:
            console.print(f"  {path}")

    _run("sensitivity", body)


@app.command()
def validate(
    config_path: Optional[Path] = ConfigOption,
    seed: Optional[int] = SeedOption,
    draws: Optional[int] = DrawsOption,
    threshold_pct: Optional[float] = ThresholdOption,
    out: Optional[Path] = OutOption,
) -> None:
    """Gradient check plus MCMC oracle comparison; exits 4 on disagreement."""

    def body() -> None:
        config = _load_config(config_path, seed, draws, threshold_pct, out)
        data = load_inputs(config)
        outcome = run_validation(config, data, config.output.out_dir)
        console.print(
            f"Gradient check: max relative error {outcome.gradient.max_relative_error:.3g} "
            f"({outcome.gradient.worst_parameter})"
        )
        if outcome.comparison is not None:
            table = Table(title="Laplace vs MCMC (fixed effects)")
            for column in ("Parameter", "Laplace mean", "MCMC mean", "MCMC SD", "Gap (SD)"):
                table.add_column(column)
            for row in outcome.comparison.rows():
                table.add_row(
                    str(row["parameter"]),
                    f"{row['laplace_mean']:.4f}",
                    f"{row['mcmc_mean']:.4f}",
                    f"{row['mcmc_sd']:.4f}",
                    f"{row['gap_sd']:.3f}",
                )
            console.print(table)
        console.print(f"Report: {outcome.report_path}")
        if outcome.error is not None:
            raise outcome.error

    _run("validate", body)


if __name__ == "__main__":
    app()
