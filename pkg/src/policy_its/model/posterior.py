"""Survey-weighted log-posterior of the ITS model with analytic derivatives.

Parameter vector ``theta = [beta, gamma, delta, h_gamma, h_delta]`` with
``h = log sigma``. The log-posterior is the sum of

* ``loglik``: sum_i w_i (y_i mu_i - log(1 + e^mu_i)), mu = X beta + gamma[t] + delta[l]
* ``beta_prior``: Normal(0, variance) on every beta except a flat intercept
* ``gamma_prior`` / ``delta_prior``: Normal(0, sigma^2) per random effect
* ``sum_to_zero``: -kappa/2 (sum gamma)^2 - kappa/2 (sum delta)^2
* ``sigma_gamma_prior`` / ``sigma_delta_prior``: PC exponential on sigma with
  the log-sigma Jacobian

Usage::

    target = PosteriorTarget(design, priors)
    value = target.log_posterior(theta)
    grad = target.gradient(theta)
    hess = target.hessian(theta)
"""

from __future__ import annotations

import math

import numpy as np
import scipy.sparse as sp
from scipy.special import expit

from policy_its.core.exceptions import ArtifactError, NumericalError
from policy_its.core.types import FloatArray
from policy_its.model.design import Design, DesignRow
from policy_its.model.params import ParameterSlices, ParameterVector
from policy_its.model.priors import LOG_2PI, PriorSpec


class PosteriorTarget:
    """Log-posterior, gradient and Hessian for one design and prior."""

    def __init__(self, design: Design, priors: PriorSpec | None = None) -> None:
        self.design = design
        self.priors = priors or PriorSpec()
        self.slices = design.slices
        self.A = design.latent_matrix
        self.y = design.outcomes
        self.w = design.weights

        precision = np.full(self.slices.n_fixed, 1.0 / self.priors.fixed_effect_variance)
        log_norm = np.full(self.slices.n_fixed, -0.5 * (LOG_2PI + math.log(self.priors.fixed_effect_variance)))
        if self.slices.n_fixed:
            if self.priors.intercept_variance is None:
                precision[0] = 0.0
                log_norm[0] = 0.0
            else:
                precision[0] = 1.0 / self.priors.intercept_variance
                log_norm[0] = -0.5 * (LOG_2PI + math.log(self.priors.intercept_variance))
        self.beta_precision = precision
        self.beta_log_norm = float(log_norm.sum())
        self.kappa = self.priors.sum_to_zero_precision
        self.lam = self.priors.pc_rate

    # ── Pieces ──────────────────────────────────────────────────────

    @property
    def n_latent(self) -> int:
        return self.slices.n_latent

    @property
    def size(self) -> int:
        return self.slices.size

    def mu(self, latent: FloatArray) -> FloatArray:
        return np.asarray(self.A @ latent, dtype=np.float64)

    def _split(self, theta: FloatArray) -> tuple[FloatArray, float, float]:
        theta = np.asarray(theta, dtype=np.float64)
        self.slices.check(theta)
        return theta[: self.n_latent], float(theta[self.slices.h_gamma]), float(theta[self.slices.h_delta])

    def terms(self, theta: FloatArray) -> dict[str, float]:
        """Every additive term of the log-posterior, by name."""
        latent, h_gamma, h_delta = self._split(theta)
        return self._latent_terms(latent, h_gamma, h_delta) | {
            "sigma_gamma_prior": self._pc_log(h_gamma),
            "sigma_delta_prior": self._pc_log(h_delta),
        }

    def _pc_log(self, h: float) -> float:
        return math.log(self.lam) - self.lam * math.exp(h) + h

    def _latent_terms(self, latent: FloatArray, h_gamma: float, h_delta: float) -> dict[str, float]:
        s = self.slices
        beta, gamma, delta = latent[s.beta], latent[s.gamma], latent[s.delta]
        mu = self.mu(latent)
        loglik = float(np.sum(self.w * (self.y * mu - np.logaddexp(0.0, mu))))

        def normal_block(values: FloatArray, h: float) -> float:
            k = values.shape[0]
            return float(-k * h - 0.5 * k * LOG_2PI - 0.5 * math.exp(-2.0 * h) * np.dot(values, values))

        return {
            "loglik": loglik,
            "beta_prior": float(-0.5 * np.dot(self.beta_precision * beta, beta) + self.beta_log_norm),
            "gamma_prior": normal_block(gamma, h_gamma),
            "delta_prior": normal_block(delta, h_delta),
            "sum_to_zero": float(-0.5 * self.kappa * (gamma.sum() ** 2 + delta.sum() ** 2)),
        }

    @staticmethod
    def _checked_sum(terms: dict[str, float]) -> float:
        for name, value in terms.items():
            if not math.isfinite(value):
                raise NumericalError(f"Non-finite log-posterior term {name!r}: {value}", term=name)
        return float(sum(terms.values()))

    # ── Full parameter vector ───────────────────────────────────────

    def log_posterior(self, theta: FloatArray) -> float:
        return self._checked_sum(self.terms(theta))

    def gradient(self, theta: FloatArray) -> FloatArray:
        latent, h_gamma, h_delta = self._split(theta)
        grad = np.empty(self.size)
        grad[: self.n_latent] = self.latent_gradient(latent, h_gamma, h_delta)
        s = self.slices
        grad[s.h_gamma] = self._hyper_gradient(latent[s.gamma], h_gamma)
        grad[s.h_delta] = self._hyper_gradient(latent[s.delta], h_delta)
        if not np.all(np.isfinite(grad)):
            raise NumericalError("Non-finite gradient", term="gradient")
        return grad

    def _hyper_gradient(self, values: FloatArray, h: float) -> float:
        k = values.shape[0]
        return float(-k + math.exp(-2.0 * h) * np.dot(values, values) - self.lam * math.exp(h) + 1.0)

    def hessian(self, theta: FloatArray) -> FloatArray:
        latent, h_gamma, h_delta = self._split(theta)
        s = self.slices
        hess = np.zeros((self.size, self.size))
        hess[: self.n_latent, : self.n_latent] = self.latent_hessian(latent, h_gamma, h_delta)
        for block, h, idx in ((s.gamma, h_gamma, s.h_gamma), (s.delta, h_delta, s.h_delta)):
            values = latent[block]
            cross = 2.0 * math.exp(-2.0 * h) * values
            hess[block, idx] = cross
            hess[idx, block] = cross
            hess[idx, idx] = -2.0 * math.exp(-2.0 * h) * np.dot(values, values) - self.lam * math.exp(h)
        if not np.all(np.isfinite(hess)):
            raise NumericalError("Non-finite Hessian", term="hessian")
        return hess

    # ── Latent field at fixed hyperparameters ───────────────────────

    def latent_value(self, latent: FloatArray, h_gamma: float, h_delta: float) -> float:
        """Log-posterior at fixed (h_gamma, h_delta), hyperprior terms included."""
        terms = self._latent_terms(latent, h_gamma, h_delta)
        terms["sigma_gamma_prior"] = self._pc_log(h_gamma)
        terms["sigma_delta_prior"] = self._pc_log(h_delta)
        return self._checked_sum(terms)

    def _prior_precision(self, h_gamma: float, h_delta: float) -> FloatArray:
        s = self.slices
        return np.concatenate(
            [
                self.beta_precision,
                np.full(s.n_time, math.exp(-2.0 * h_gamma)),
                np.full(s.n_area, math.exp(-2.0 * h_delta)),
            ]
        )

    def latent_gradient(self, latent: FloatArray, h_gamma: float, h_delta: float) -> FloatArray:
        s = self.slices
        mu = self.mu(latent)
        residual = self.w * (self.y - expit(mu))
        grad = np.asarray(self.A.T @ residual, dtype=np.float64)
        grad -= self._prior_precision(h_gamma, h_delta) * latent
        grad[s.gamma] -= self.kappa * latent[s.gamma].sum()
        grad[s.delta] -= self.kappa * latent[s.delta].sum()
        return grad

    def latent_hessian(self, latent: FloatArray, h_gamma: float, h_delta: float) -> FloatArray:
        s = self.slices
        p = expit(self.mu(latent))
        curvature = self.w * p * (1.0 - p)
        weighted = sp.diags(curvature) @ self.A
        hess = -np.asarray((self.A.T @ weighted).toarray(), dtype=np.float64)
        hess = 0.5 * (hess + hess.T)
        hess[np.diag_indices(self.n_latent)] -= self._prior_precision(h_gamma, h_delta)
        hess[s.gamma, s.gamma] -= self.kappa
        hess[s.delta, s.delta] -= self.kappa
        return hess


# ── Functional surface ─────────────────────────────────────────────────


def _design_for(design: Design, outcomes: FloatArray | None, weights: FloatArray | None) -> Design:
    if outcomes is None and weights is None:
        return design
    y = design.outcomes if outcomes is None else np.asarray(outcomes, dtype=np.float64)
    w = design.weights if weights is None else np.asarray(weights, dtype=np.float64)
    if y.shape != (design.n,) or w.shape != (design.n,):
        raise ArtifactError("outcomes and weights must have one entry per design row")
    if np.any(w <= 0):
        raise NumericalError("weights must be positive", term="weights")
    return Design(
        manifest=design.manifest,
        X=design.X,
        time_index=design.time_index,
        area_index=design.area_index,
        outcomes=y,
        weights=w,
        centered_year=design.centered_year,
        exposed=design.exposed,
    )


def linear_predictor(params: ParameterVector, row: DesignRow | Design) -> float | FloatArray:
    """mu for one row, or for every row of a design."""
    if isinstance(row, DesignRow):
        return float(np.dot(row.fixed, params.beta) + params.gamma[row.time_index] + params.delta[row.area_index])
    expected = ParameterSlices.from_manifest(row.manifest)
    if params.slices != expected:
        raise ArtifactError(f"Parameter blocks {params.slices} do not match layout {expected}")
    return row.X @ params.beta + params.gamma[row.time_index] + params.delta[row.area_index]


def log_posterior(
    params: ParameterVector,
    design: Design,
    outcomes: FloatArray | None = None,
    weights: FloatArray | None = None,
    priors: PriorSpec | None = None,
) -> float:
    return PosteriorTarget(_design_for(design, outcomes, weights), priors).log_posterior(params.to_array())


def gradient(
    params: ParameterVector,
    design: Design,
    outcomes: FloatArray | None = None,
    weights: FloatArray | None = None,
    priors: PriorSpec | None = None,
) -> FloatArray:
    return PosteriorTarget(_design_for(design, outcomes, weights), priors).gradient(params.to_array())


def hessian(
    params: ParameterVector,
    design: Design,
    outcomes: FloatArray | None = None,
    weights: FloatArray | None = None,
    priors: PriorSpec | None = None,
) -> FloatArray:
    return PosteriorTarget(_design_for(design, outcomes, weights), priors).hessian(params.to_array())
