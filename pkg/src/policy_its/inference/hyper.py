"""Weighted grid over (log sigma_gamma, log sigma_delta).

The Laplace-approximate marginal log-likelihood is maximized by a bounded
derivative-free search; a square grid is then laid around the optimum
(shifted inward so it stays inside the bounds) and every point is weighted by
``exp(value - max)``, normalized.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from policy_its.core.exceptions import ConvergenceError, NumericalError
from policy_its.core.types import FloatArray
from policy_its.inference.laplace import MapFit, fit_map
from policy_its.model.posterior import PosteriorTarget

log = logging.getLogger(__name__)


@dataclass
class GridPoint:
    """One hyperparameter point with its mode and weight."""

    log_sigma_gamma: float
    log_sigma_delta: float
    log_marginal: float
    weight: float = 0.0
    fit: MapFit | None = None
    mode: FloatArray | None = None

    @property
    def latent_mode(self) -> FloatArray:
        if self.fit is not None:
            return self.fit.latent
        if self.mode is None:
            raise ValueError("Grid point carries no mode")
        return self.mode


@dataclass
class HyperGrid:
    """Grid points (row-major over gamma then delta) plus the optimum fit."""

    points: list[GridPoint]
    optimum: MapFit
    evaluations: int = 0
    search_trace: list[dict[str, float]] = field(default_factory=list)

    @property
    def weights(self) -> FloatArray:
        return np.array([p.weight for p in self.points])

    def posterior_mass_below(self, axis: str, log_sigma: float) -> float:
        """Grid weight on points with log sigma (``gamma`` or ``delta``) at or below *log_sigma*."""
        attr = f"log_sigma_{axis}"
        return float(sum(p.weight for p in self.points if getattr(p, attr) <= log_sigma))


def grid_axis(center: float, size: int, spacing: float, bounds: tuple[float, float]) -> FloatArray:
    """*size* equally spaced values around *center*, shifted to lie inside *bounds*."""
    half = 0.5 * (size - 1) * spacing
    lo, hi = bounds
    if 2 * half > hi - lo:
        raise ValueError("Grid is wider than the log-sigma bounds")
    shifted = min(max(center, lo + half), hi - half)
    return shifted + spacing * (np.arange(size) - 0.5 * (size - 1))


def normalize_log_weights(values: FloatArray) -> FloatArray:
    shifted = np.exp(values - np.max(values))
    return shifted / shifted.sum()


class _MarginalSearch:
    """Negative Laplace marginal with warm starts between evaluations."""

    def __init__(self, target: PosteriorTarget, tol: float, max_iter: int) -> None:
        self.target = target
        self.tol = tol
        self.max_iter = max_iter
        self.start: FloatArray | None = None
        self.best: MapFit | None = None
        self.trace: list[dict[str, float]] = []

    def fit(self, h_gamma: float, h_delta: float) -> MapFit:
        return fit_map(self.target, h_gamma, h_delta, start=self.start, tol=self.tol, max_iter=self.max_iter)

    def __call__(self, h: FloatArray) -> float:
        try:
            result = self.fit(float(h[0]), float(h[1]))
        except (ConvergenceError, NumericalError) as exc:
            log.debug("Marginal evaluation failed at %s: %s", h, exc)
            return np.inf
        self.start = result.latent
        value = result.log_marginal
        self.trace.append({"log_sigma_gamma": float(h[0]), "log_sigma_delta": float(h[1]), "log_marginal": value})
        if self.best is None or value > self.best.log_marginal:
            self.best = result
        return -value


def optimize_hyper(
    target: PosteriorTarget,
    *,
    grid_size: int = 5,
    spacing: float = 0.5,
    bounds: tuple[float, float] = (-4.0, 3.0),
    tol: float = 1e-8,
    max_iter: int = 200,
    max_workers: int = 1,
) -> HyperGrid:
    """Evaluate the Laplace marginal on a grid centered at its optimum."""
    search = _MarginalSearch(target, tol, max_iter)
    result = optimize.minimize(
        search,
        x0=np.zeros(2),
        method="Powell",
        bounds=[bounds, bounds],
        options={"xtol": 1e-3, "ftol": 1e-8},
    )
    if search.best is None:
        raise ConvergenceError("No hyperparameter point produced a valid mode", [dict(t) for t in search.trace])
    optimum = search.fit(float(result.x[0]), float(result.x[1]))
    if optimum.log_marginal < search.best.log_marginal:
        optimum = search.best
    log.info(
        "Hyper optimum log sigma = (%.3f, %.3f) after %d evaluations",
        optimum.h_gamma,
        optimum.h_delta,
        len(search.trace),
    )

    axis_gamma = grid_axis(optimum.h_gamma, grid_size, spacing, bounds)
    axis_delta = grid_axis(optimum.h_delta, grid_size, spacing, bounds)
    coords = [(float(g), float(d)) for g in axis_gamma for d in axis_delta]

    def fit_point(h: tuple[float, float]) -> MapFit:
        return fit_map(target, h[0], h[1], start=optimum.latent, tol=tol, max_iter=max_iter)

    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            fits = list(pool.map(fit_point, coords))
    else:
        fits = [fit_point(h) for h in coords]

    values = np.array([f.log_marginal for f in fits])
    weights = normalize_log_weights(values)
    points = [
        GridPoint(
            log_sigma_gamma=h[0],
            log_sigma_delta=h[1],
            log_marginal=float(v),
            weight=float(w),
            fit=f,
        )
        for h, v, w, f in zip(coords, values, weights, fits)
    ]
    return HyperGrid(points=points, optimum=optimum, evaluations=len(search.trace), search_trace=search.trace)
