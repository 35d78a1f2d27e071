"""Fitted posterior: MAP point, Laplace covariance, hyper grid and draws.

``fit_posterior`` runs the whole scheme for one design::

    fitted = fit_posterior(design, priors, config.inference)
    artifact = fitted.to_artifact()
    restored = FittedPosterior.from_artifact(artifact)

The artifact is plain JSON without timestamps, so identical inputs give
identical bytes. Precision factors of the grid points are not stored;
a restored posterior carries its draws but cannot generate new ones.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from pydantic import BaseModel, Field

from policy_its._version import __version__
from policy_its.core.config import InferenceConfig
from policy_its.core.exceptions import ArtifactError
from policy_its.core.types import FloatArray
from policy_its.inference.hyper import GridPoint, HyperGrid, optimize_hyper
from policy_its.inference.laplace import MapFit
from policy_its.inference.sampling import draw_posterior
from policy_its.model.design import Design
from policy_its.model.layout import LayoutManifest
from policy_its.model.params import ParameterSlices, ParameterVector
from policy_its.model.posterior import PosteriorTarget
from policy_its.model.priors import PriorSpec

log = logging.getLogger(__name__)

ARTIFACT_FORMAT_VERSION = 1


# ── Artifact schema ──────────────────────────────────────────────────


class HyperGridEntry(BaseModel):
    log_sigma_gamma: float
    log_sigma_delta: float
    log_marginal: float
    weight: float
    mode: list[float]


class FitArtifact(BaseModel):
    """Versioned JSON form of a ``FittedPosterior``."""

    format_version: int = ARTIFACT_FORMAT_VERSION
    engine_version: str = __version__
    config_hash: str = ""
    data_hash: str = ""
    seed: int
    definition: str = ""
    manifest: LayoutManifest
    priors: PriorSpec
    map_point: list[float]
    laplace_cov: list[list[float]]
    hyper_grid: list[HyperGridEntry]
    draws: list[list[float]] = Field(default_factory=list)
    diagnostics: dict[str, Any] = Field(default_factory=dict)


# ── In-memory posterior ──────────────────────────────────────────────


@dataclass
class FittedPosterior:
    """Everything downstream effects need, plus fit diagnostics."""

    manifest: LayoutManifest
    priors: PriorSpec
    map_theta: FloatArray
    laplace_cov: FloatArray
    grid: list[GridPoint]
    draws: FloatArray
    seed: int
    diagnostics: dict[str, Any] = field(default_factory=dict)
    hyper: HyperGrid | None = None
    config_hash: str = ""
    data_hash: str = ""

    @property
    def slices(self) -> ParameterSlices:
        return ParameterSlices.from_manifest(self.manifest)

    @property
    def map_point(self) -> ParameterVector:
        return ParameterVector.from_array(self.map_theta, self.slices)

    @property
    def n_draws(self) -> int:
        return int(self.draws.shape[0])

    @property
    def grid_weights(self) -> FloatArray:
        return np.array([p.weight for p in self.grid])

    def draw(self, index: int) -> ParameterVector:
        return ParameterVector.from_array(self.draws[index], self.slices)

    def latent_draws(self) -> FloatArray:
        return self.draws[:, : self.slices.n_latent]

    def mixture_mean(self) -> FloatArray:
        """Weighted mean of the grid modes over the full parameter vector."""
        rows = [np.concatenate([p.latent_mode, [p.log_sigma_gamma, p.log_sigma_delta]]) for p in self.grid]
        return np.asarray(self.grid_weights @ np.vstack(rows), dtype=np.float64)

    def check_manifest(self, manifest: LayoutManifest) -> None:
        """Raise ``ArtifactError`` unless *manifest* describes the same layout."""
        if manifest.digest() != self.manifest.digest():
            raise ArtifactError(
                "Fit artifact layout does not match the current data "
                f"({self.manifest.digest()} vs {manifest.digest()}); refit required"
            )

    def to_artifact(self) -> FitArtifact:
        return FitArtifact(
            config_hash=self.config_hash,
            data_hash=self.data_hash,
            seed=self.seed,
            definition=self.manifest.definition,
            manifest=self.manifest,
            priors=self.priors,
            map_point=[float(v) for v in self.map_theta],
            laplace_cov=[[float(v) for v in row] for row in self.laplace_cov],
            hyper_grid=[
                HyperGridEntry(
                    log_sigma_gamma=p.log_sigma_gamma,
                    log_sigma_delta=p.log_sigma_delta,
                    log_marginal=p.log_marginal,
                    weight=p.weight,
                    mode=[float(v) for v in p.latent_mode],
                )
                for p in self.grid
            ],
            draws=[[float(v) for v in row] for row in self.draws],
            diagnostics=self.diagnostics,
        )

    @classmethod
    def from_artifact(cls, artifact: FitArtifact) -> FittedPosterior:
        if artifact.format_version != ARTIFACT_FORMAT_VERSION:
            raise ArtifactError(
                f"Artifact format {artifact.format_version} is not supported (expected {ARTIFACT_FORMAT_VERSION})"
            )
        slices = ParameterSlices.from_manifest(artifact.manifest)
        draws = np.array(artifact.draws, dtype=np.float64).reshape(len(artifact.draws), slices.size)
        return cls(
            manifest=artifact.manifest,
            priors=artifact.priors,
            map_theta=np.array(artifact.map_point, dtype=np.float64),
            laplace_cov=np.array(artifact.laplace_cov, dtype=np.float64),
            grid=[
                GridPoint(
                    log_sigma_gamma=e.log_sigma_gamma,
                    log_sigma_delta=e.log_sigma_delta,
                    log_marginal=e.log_marginal,
                    weight=e.weight,
                    mode=np.array(e.mode, dtype=np.float64),
                )
                for e in artifact.hyper_grid
            ],
            draws=draws,
            seed=artifact.seed,
            diagnostics=dict(artifact.diagnostics),
            config_hash=artifact.config_hash,
            data_hash=artifact.data_hash,
        )


def _diagnostics(optimum: MapFit, hyper: HyperGrid) -> dict[str, Any]:
    return {
        "optimizer_method": optimum.method,
        "optimizer_iterations": optimum.iterations,
        "optimizer_trace": optimum.trace,
        "hyper_evaluations": hyper.evaluations,
        "precision_condition_number": optimum.condition_number,
        "hyper_optimum": [optimum.h_gamma, optimum.h_delta],
        "log_marginal_optimum": optimum.log_marginal,
    }


def fit_posterior(
    design: Design,
    priors: PriorSpec,
    config: InferenceConfig | None = None,
    *,
    config_hash: str = "",
    data_hash: str = "",
) -> FittedPosterior:
    """MAP + Laplace over the latent field, weighted hyper grid, then draws."""
    config = config or InferenceConfig()
    target = PosteriorTarget(design, priors)
    hyper = optimize_hyper(
        target,
        grid_size=config.grid_size,
        spacing=config.grid_spacing,
        bounds=(config.log_sigma_lower, config.log_sigma_upper),
        tol=config.newton_tol,
        max_iter=config.newton_max_iter,
        max_workers=config.max_workers,
    )
    optimum = hyper.optimum
    draws = draw_posterior(hyper, config.n_draws, config.seed)
    log.info("Drew %d posterior samples over %d grid points", draws.shape[0], len(hyper.points))
    return FittedPosterior(
        manifest=design.manifest,
        priors=priors,
        map_theta=optimum.theta,
        laplace_cov=optimum.covariance,
        grid=hyper.points,
        draws=draws,
        seed=config.seed,
        diagnostics=_diagnostics(optimum, hyper),
        hyper=hyper,
        config_hash=config_hash,
        data_hash=data_hash,
    )
