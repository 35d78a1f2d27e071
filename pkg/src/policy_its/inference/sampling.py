"""Posterior draws from the weighted mixture of Laplace Gaussians.

Draw ``i`` uses its own generator seeded with ``(seed, i)``, so any single
draw can be regenerated without the others.
"""

from __future__ import annotations

import numpy as np
from scipy import linalg

from policy_its.core.exceptions import ArtifactError
from policy_its.core.types import FloatArray
from policy_its.inference.hyper import HyperGrid


def draw_generator(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([seed, index])


def draw_one(grid: HyperGrid, seed: int, index: int) -> FloatArray:
    """Pick a grid point by weight, then sample the latent field from its Gaussian."""
    rng = draw_generator(seed, index)
    point = grid.points[int(rng.choice(len(grid.points), p=grid.weights))]
    if point.fit is None:
        raise ArtifactError("Grid point has no precision factor; draws need an in-memory fit")
    z = rng.standard_normal(point.fit.latent.shape[0])
    latent = point.fit.latent + linalg.solve_triangular(point.fit.chol, z, lower=True, trans="T")
    return np.concatenate([latent, [point.log_sigma_gamma, point.log_sigma_delta]])


def draw_posterior(grid: HyperGrid, n_draws: int, seed: int) -> FloatArray:
    """``n_draws`` full parameter vectors, one per row; deterministic given *seed*."""
    size = grid.optimum.latent.shape[0] + 2
    if n_draws == 0:
        return np.zeros((0, size))
    return np.vstack([draw_one(grid, seed, i) for i in range(n_draws)])
