"""Validation against independent oracles: finite differences and MCMC."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from policy_its.core.exceptions import OracleDisagreementError, OracleNotConvergedError
from policy_its.core.types import FloatArray
from policy_its.inference.fitted import FittedPosterior
from policy_its.inference.mcmc import McmcResult
from policy_its.model.posterior import PosteriorTarget

log = logging.getLogger(__name__)


# ── Gradient check ───────────────────────────────────────────────────


@dataclass
class GradientCheck:
    """Worst relative error between analytic and central-difference gradients."""

    points: int
    max_relative_error: float
    worst_parameter: str
    per_point: list[float] = field(default_factory=list)

    def passed(self, tolerance: float = 1e-6) -> bool:
        return self.max_relative_error < tolerance


def relative_error(analytic: FloatArray, numeric: FloatArray) -> FloatArray:
    """|a - b| / max(1, |a|, |b|) per coordinate."""
    scale = np.maximum(1.0, np.maximum(np.abs(analytic), np.abs(numeric)))
    return np.asarray(np.abs(analytic - numeric) / scale, dtype=np.float64)


def central_difference(target: PosteriorTarget, theta: FloatArray, step: float = 1e-5) -> FloatArray:
    grad = np.empty_like(theta)
    for i in range(theta.shape[0]):
        h = step * max(1.0, abs(theta[i]))
        up, down = theta.copy(), theta.copy()
        up[i] += h
        down[i] -= h
        grad[i] = (target.log_posterior(up) - target.log_posterior(down)) / (2.0 * h)
    return grad


def random_point(target: PosteriorTarget, rng: np.random.Generator) -> FloatArray:
    """Random parameter vector with zero-sum random effects."""
    s = target.slices
    theta = np.empty(s.size)
    theta[s.beta] = 0.5 * rng.standard_normal(s.n_fixed)
    for block, count in ((s.gamma, s.n_time), (s.delta, s.n_area)):
        values = 0.5 * rng.standard_normal(count)
        theta[block] = values - values.mean() if count else values
    theta[[s.h_gamma, s.h_delta]] = rng.uniform(-1.0, 1.0, size=2)
    return theta


def check_gradient(target: PosteriorTarget, points: int = 20, seed: int = 0) -> GradientCheck:
    """Compare the analytic gradient with central differences at random points."""
    rng = np.random.default_rng(seed)
    names = target.design.manifest.parameter_names()
    worst, worst_name, per_point = 0.0, "", []
    for _ in range(points):
        theta = random_point(target, rng)
        errors = relative_error(target.gradient(theta), central_difference(target, theta))
        idx = int(np.argmax(errors))
        per_point.append(float(errors[idx]))
        if errors[idx] > worst:
            worst, worst_name = float(errors[idx]), names[idx]
    log.info("Gradient check over %d points: max relative error %.3g (%s)", points, worst, worst_name)
    return GradientCheck(points=points, max_relative_error=worst, worst_parameter=worst_name, per_point=per_point)


# ── MCMC comparison ──────────────────────────────────────────────────


@dataclass
class OracleComparison:
    """Per fixed effect: Laplace mean, MCMC mean and SD, standardized gap."""

    names: list[str]
    laplace_mean: FloatArray
    mcmc_mean: FloatArray
    mcmc_sd: FloatArray
    max_rhat: float
    tolerance_sd: float

    @property
    def gap_sd(self) -> FloatArray:
        return np.asarray(np.abs(self.laplace_mean - self.mcmc_mean) / self.mcmc_sd, dtype=np.float64)

    def offenders(self) -> dict[str, float]:
        return {n: float(g) for n, g in zip(self.names, self.gap_sd) if g > self.tolerance_sd}

    def rows(self) -> list[dict[str, float | str]]:
        return [
            {"parameter": n, "laplace_mean": float(a), "mcmc_mean": float(b), "mcmc_sd": float(c), "gap_sd": float(g)}
            for n, a, b, c, g in zip(self.names, self.laplace_mean, self.mcmc_mean, self.mcmc_sd, self.gap_sd)
        ]


def compare_with_oracle(
    fitted: FittedPosterior,
    mcmc: McmcResult,
    *,
    tolerance_sd: float = 0.1,
    rhat_threshold: float = 1.05,
) -> OracleComparison:
    """Fixed-effect means of the Laplace mixture against MCMC means.

    Refuses to compare (``OracleNotConvergedError``) when any coordinate's
    R-hat exceeds *rhat_threshold*; raises ``OracleDisagreementError`` when a
    gap exceeds *tolerance_sd* MCMC posterior SDs.
    """
    unconverged = mcmc.unconverged(rhat_threshold)
    if unconverged:
        raise OracleNotConvergedError(
            f"{len(unconverged)} coordinates have R-hat above {rhat_threshold}; comparison refused",
            unconverged,
        )
    beta = fitted.slices.beta
    comparison = OracleComparison(
        names=list(fitted.manifest.columns),
        laplace_mean=fitted.mixture_mean()[beta],
        mcmc_mean=mcmc.mean()[beta],
        mcmc_sd=mcmc.sd()[beta],
        max_rhat=mcmc.max_rhat(),
        tolerance_sd=tolerance_sd,
    )
    offenders = comparison.offenders()
    if offenders:
        raise OracleDisagreementError(
            f"{len(offenders)} fixed effects differ from the MCMC oracle by more than {tolerance_sd} SD",
            offenders,
        )
    log.info("Laplace and MCMC agree: max gap %.3f SD", float(np.max(comparison.gap_sd)))
    return comparison
