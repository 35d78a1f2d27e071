"""Structured view of the flat parameter vector."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from policy_its.core.exceptions import ArtifactError
from policy_its.core.types import FloatArray
from policy_its.model.layout import LayoutManifest


@dataclass(frozen=True)
class ParameterSlices:
    """Positions of each block inside ``[beta, gamma, delta, h_gamma, h_delta]``."""

    n_fixed: int
    n_time: int
    n_area: int

    @classmethod
    def from_manifest(cls, manifest: LayoutManifest) -> ParameterSlices:
        return cls(manifest.n_fixed, manifest.n_time, manifest.n_area)

    @property
    def beta(self) -> slice:
        return slice(0, self.n_fixed)

    @property
    def gamma(self) -> slice:
        return slice(self.n_fixed, self.n_fixed + self.n_time)

    @property
    def delta(self) -> slice:
        start = self.n_fixed + self.n_time
        return slice(start, start + self.n_area)

    @property
    def latent(self) -> slice:
        return slice(0, self.n_latent)

    @property
    def n_latent(self) -> int:
        return self.n_fixed + self.n_time + self.n_area

    @property
    def h_gamma(self) -> int:
        return self.n_latent

    @property
    def h_delta(self) -> int:
        return self.n_latent + 1

    @property
    def size(self) -> int:
        return self.n_latent + 2

    def check(self, theta: FloatArray) -> None:
        if theta.ndim != 1 or theta.shape[0] != self.size:
            raise ArtifactError(f"Parameter vector has shape {theta.shape}, layout expects ({self.size},)")


@dataclass
class ParameterVector:
    """beta, gamma (per time index), delta (per area index) and the two log sigmas."""

    beta: FloatArray
    gamma: FloatArray
    delta: FloatArray
    log_sigma_gamma: float
    log_sigma_delta: float

    @property
    def sigma_gamma(self) -> float:
        return float(np.exp(self.log_sigma_gamma))

    @property
    def sigma_delta(self) -> float:
        return float(np.exp(self.log_sigma_delta))

    @property
    def slices(self) -> ParameterSlices:
        return ParameterSlices(len(self.beta), len(self.gamma), len(self.delta))

    def to_array(self) -> FloatArray:
        return np.concatenate(
            [self.beta, self.gamma, self.delta, np.array([self.log_sigma_gamma, self.log_sigma_delta])]
        ).astype(np.float64)

    @classmethod
    def from_array(cls, theta: FloatArray, slices: ParameterSlices) -> ParameterVector:
        theta = np.asarray(theta, dtype=np.float64)
        slices.check(theta)
        return cls(
            beta=theta[slices.beta].copy(),
            gamma=theta[slices.gamma].copy(),
            delta=theta[slices.delta].copy(),
            log_sigma_gamma=float(theta[slices.h_gamma]),
            log_sigma_delta=float(theta[slices.h_delta]),
        )

    @classmethod
    def zeros(
        cls, slices: ParameterSlices, log_sigma_gamma: float = 0.0, log_sigma_delta: float = 0.0
    ) -> ParameterVector:
        return cls(
            beta=np.zeros(slices.n_fixed),
            gamma=np.zeros(slices.n_time),
            delta=np.zeros(slices.n_area),
            log_sigma_gamma=log_sigma_gamma,
            log_sigma_delta=log_sigma_delta,
        )

    def named(self, manifest: LayoutManifest) -> dict[str, float]:
        return dict(zip(manifest.parameter_names(), (float(v) for v in self.to_array())))
