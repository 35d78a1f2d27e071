"""Mode finding over the latent field at fixed hyperparameters.

Newton iterations with Armijo backtracking. A step that is not an ascent
direction (or a Hessian that cannot be factorized) hands over to scipy's
BFGS before Newton resumes. At the mode the negative Hessian must factorize;
its Cholesky factor defines the Gaussian (Laplace) approximation.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy import linalg, optimize

from policy_its.core.exceptions import ConvergenceError, IndefiniteHessianError, NumericalError
from policy_its.core.types import FloatArray
from policy_its.model.posterior import PosteriorTarget
from policy_its.model.priors import LOG_2PI

log = logging.getLogger(__name__)

MACHINE_EPSILON = float(np.finfo(float).eps)
ARMIJO_C = 1e-4
MIN_STEP = 1e-10


@dataclass
class MapFit:
    """Mode of the latent field and the precision of its Gaussian approximation."""

    latent: FloatArray
    h_gamma: float
    h_delta: float
    log_posterior: float
    precision: FloatArray
    chol: FloatArray
    iterations: int
    method: str = "newton"
    trace: list[dict[str, Any]] = field(default_factory=list)

    @property
    def theta(self) -> FloatArray:
        return np.concatenate([self.latent, [self.h_gamma, self.h_delta]])

    @property
    def log_det_precision(self) -> float:
        return float(2.0 * np.sum(np.log(np.diag(self.chol))))

    @property
    def log_marginal(self) -> float:
        """Laplace approximation of log p(y, h): f(mode) + k/2 log 2pi - 1/2 log|Q|."""
        k = self.latent.shape[0]
        return self.log_posterior + 0.5 * k * LOG_2PI - 0.5 * self.log_det_precision

    @property
    def covariance(self) -> FloatArray:
        k = self.latent.shape[0]
        return np.asarray(linalg.cho_solve((self.chol, True), np.eye(k)), dtype=np.float64)

    @property
    def condition_number(self) -> float:
        eig = np.linalg.eigvalsh(self.precision)
        return float(eig[-1] / eig[0]) if eig.size and eig[0] > 0 else math.inf


def _cholesky(matrix: FloatArray) -> FloatArray | None:
    try:
        return np.asarray(linalg.cholesky(matrix, lower=True), dtype=np.float64)
    except linalg.LinAlgError:
        return None


def _bfgs(target: PosteriorTarget, x: FloatArray, h_gamma: float, h_delta: float, tol: float) -> FloatArray:
    result = optimize.minimize(
        lambda z: -target.latent_value(z, h_gamma, h_delta),
        x,
        jac=lambda z: -target.latent_gradient(z, h_gamma, h_delta),
        method="BFGS",
        options={"gtol": tol, "maxiter": 2000},
    )
    log.debug("BFGS fallback: %s after %d iterations", result.message, result.nit)
    return np.asarray(result.x, dtype=np.float64)


def _safe_value(target: PosteriorTarget, x: FloatArray, h_gamma: float, h_delta: float) -> float:
    try:
        return target.latent_value(x, h_gamma, h_delta)
    except NumericalError:
        return -math.inf


def fit_map(
    target: PosteriorTarget,
    h_gamma: float,
    h_delta: float,
    *,
    start: FloatArray | None = None,
    tol: float = 1e-8,
    max_iter: int = 200,
) -> MapFit:
    """Maximize the log-posterior over the latent field at fixed log sigmas.

    Stops when the gradient norm falls below *tol* or the Newton decrement
    reaches round-off level. Raises ``ConvergenceError`` (with the trace) on
    failure and ``IndefiniteHessianError`` if the mode's negative Hessian does
    not factorize.
    """
    x = np.zeros(target.n_latent) if start is None else np.array(start, dtype=np.float64)
    trace: list[dict[str, Any]] = []
    method = "newton"
    converged = False
    iterations = 0

    for iterations in range(1, max_iter + 1):
        value = target.latent_value(x, h_gamma, h_delta)
        grad = target.latent_gradient(x, h_gamma, h_delta)
        grad_norm = float(np.linalg.norm(grad))
        record: dict[str, Any] = {"iteration": iterations, "log_posterior": value, "grad_norm": grad_norm}
        trace.append(record)
        if grad_norm < tol:
            converged = True
            break

        chol = _cholesky(-target.latent_hessian(x, h_gamma, h_delta))
        step = linalg.cho_solve((chol, True), grad) if chol is not None else None
        decrement = float(grad @ step) if step is not None else -math.inf
        if not decrement > 0:
            record["fallback"] = "bfgs"
            method = "newton+bfgs"
            x = _bfgs(target, x, h_gamma, h_delta, tol)
            continue
        if 0.5 * decrement <= 1e3 * MACHINE_EPSILON * max(1.0, abs(value)):
            converged = True
            break

        alpha = 1.0
        while alpha >= MIN_STEP:
            candidate = x + alpha * step
            if _safe_value(target, candidate, h_gamma, h_delta) >= value + ARMIJO_C * alpha * decrement:
                break
            alpha *= 0.5
        record["step"] = alpha
        record["decrement"] = decrement
        if alpha < MIN_STEP:
            if 0.5 * decrement <= math.sqrt(MACHINE_EPSILON) * max(1.0, abs(value)):
                converged = True
                break
            raise ConvergenceError(f"Line search failed at iteration {iterations}", trace)
        x = candidate

    if not converged:
        raise ConvergenceError(f"Mode search did not converge in {max_iter} iterations", trace)

    precision = -target.latent_hessian(x, h_gamma, h_delta)
    chol = _cholesky(precision)
    if chol is None:
        raise IndefiniteHessianError("Negative Hessian at the mode is not positive definite", trace)
    value = target.latent_value(x, h_gamma, h_delta)
    log.debug(
        "Mode at (h_gamma=%.3f, h_delta=%.3f) after %d iterations, log posterior %.6f",
        h_gamma,
        h_delta,
        iterations,
        value,
    )
    return MapFit(
        latent=x,
        h_gamma=h_gamma,
        h_delta=h_delta,
        log_posterior=value,
        precision=precision,
        chol=chol,
        iterations=iterations,
        method=method,
        trace=trace,
    )
