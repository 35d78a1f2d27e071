"""Adaptive random-walk Metropolis-within-Gibbs oracle.

Blocks are ``beta``, ``gamma``, ``delta`` and the two log sigmas. Each block
has a Gaussian random-walk proposal whose covariance starts at the block's
conditional Laplace covariance and, during burn-in, is re-estimated from the
chain (Haario et al.) while a Robbins-Monro step tunes its scale towards the
target acceptance rate. Adaptation stops at the end of burn-in.

Random-effect proposals are projected onto the zero-sum subspace, and chains
start from zero-sum points, so the sum-to-zero penalty stays at zero. Two
group-scale moves (gamma' = c gamma, log sigma' = log sigma + log c) help the
random effects and their scales mix together; on the zero-sum subspace of
dimension k - 1 their Jacobian is c^(k - 1).

Split R-hat and effective sample sizes come from arviz.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import arviz as az
import numpy as np
from scipy import linalg

from policy_its.core.exceptions import NumericalError
from policy_its.core.types import FloatArray
from policy_its.inference.laplace import MapFit
from policy_its.model.posterior import PosteriorTarget

log = logging.getLogger(__name__)

TARGET_ACCEPTANCE = 0.234
TARGET_ACCEPTANCE_1D = 0.44
ADAPT_EVERY = 50
ADAPT_START = 200
SCALE_MOVE_SD = 0.1


@dataclass
class _Block:
    name: str
    index: np.ndarray
    centered: bool
    cov: FloatArray
    log_scale: float
    accepted: int = 0
    proposed: int = 0
    chol: FloatArray = field(init=False)

    def __post_init__(self) -> None:
        self.refresh()

    @property
    def dim(self) -> int:
        return int(self.index.shape[0])

    def refresh(self) -> None:
        scaled = math.exp(2.0 * self.log_scale) * self.cov
        jitter = 1e-12 * max(1.0, float(np.max(np.abs(np.diag(scaled)))))
        self.chol = np.asarray(linalg.cholesky(scaled + jitter * np.eye(self.dim), lower=True), dtype=np.float64)

    def propose(self, rng: np.random.Generator) -> FloatArray:
        step = self.chol @ rng.standard_normal(self.dim)
        if self.centered:
            step -= step.mean()
        return step


@dataclass
class McmcResult:
    """Post-burn-in samples of every chain with diagnostics."""

    samples: FloatArray
    names: list[str]
    acceptance: dict[str, float]
    rhat: FloatArray
    ess: FloatArray

    @property
    def n_chains(self) -> int:
        return int(self.samples.shape[0])

    def pooled(self) -> FloatArray:
        return self.samples.reshape(-1, self.samples.shape[-1])

    def mean(self) -> FloatArray:
        return np.asarray(self.pooled().mean(axis=0), dtype=np.float64)

    def sd(self) -> FloatArray:
        return np.asarray(self.pooled().std(axis=0, ddof=1), dtype=np.float64)

    def max_rhat(self) -> float:
        finite = self.rhat[np.isfinite(self.rhat)]
        return float(finite.max()) if finite.size else math.nan

    def unconverged(self, threshold: float) -> dict[str, float]:
        return {n: float(r) for n, r in zip(self.names, self.rhat) if np.isfinite(r) and r > threshold}


def _diagnostics(samples: FloatArray) -> tuple[FloatArray, FloatArray]:
    dataset = az.convert_to_dataset(samples)
    rhat = np.asarray(az.rhat(dataset)["x"].values, dtype=np.float64)
    ess = np.asarray(az.ess(dataset)["x"].values, dtype=np.float64)
    return rhat, ess


def _safe_log_posterior(target: PosteriorTarget, theta: FloatArray) -> float:
    try:
        return target.log_posterior(theta)
    except (NumericalError, OverflowError):
        return -math.inf


def _center(theta: FloatArray, target: PosteriorTarget) -> FloatArray:
    s = target.slices
    theta = theta.copy()
    theta[s.gamma] -= theta[s.gamma].mean() if s.n_time else 0.0
    theta[s.delta] -= theta[s.delta].mean() if s.n_area else 0.0
    return theta


def _blocks(target: PosteriorTarget, start: MapFit) -> list[_Block]:
    s = target.slices
    blocks = []
    for name, block, centered in (("beta", s.beta, False), ("gamma", s.gamma, True), ("delta", s.delta, True)):
        index = np.arange(block.start, block.stop)
        if index.size == 0:
            continue
        sub = start.precision[np.ix_(index, index)]
        cov = np.asarray(linalg.inv(sub), dtype=np.float64)
        cov = 0.5 * (cov + cov.T)
        blocks.append(_Block(name, index, centered, cov, 0.5 * math.log(2.38**2 / index.size)))
    hyper = np.array([s.h_gamma, s.h_delta])
    blocks.append(_Block("hyper", hyper, False, 0.04 * np.eye(2), 0.5 * math.log(2.38**2 / 2)))
    return blocks


def _run_chain(
    target: PosteriorTarget,
    start: MapFit,
    rng: np.random.Generator,
    iterations: int,
    burn_in: int,
) -> tuple[FloatArray, dict[str, float]]:
    s = target.slices
    blocks = _blocks(target, start)
    scale_moves = [
        ("scale_gamma", s.gamma, s.h_gamma, s.n_time),
        ("scale_delta", s.delta, s.h_delta, s.n_area),
    ]
    scale_log_sd = {name: math.log(SCALE_MOVE_SD) for name, *_ in scale_moves}
    scale_counts = {name: [0, 0] for name, *_ in scale_moves}

    # Overdispersed zero-sum start around the mode.
    theta = start.theta.copy()
    z = rng.standard_normal(s.n_latent)
    theta[: s.n_latent] += 2.0 * linalg.solve_triangular(start.chol, z, lower=True, trans="T")
    theta[[s.h_gamma, s.h_delta]] += 0.5 * rng.standard_normal(2)
    theta = _center(theta, target)
    current = _safe_log_posterior(target, theta)
    if not math.isfinite(current):
        theta = _center(start.theta.copy(), target)
        current = _safe_log_posterior(target, theta)

    history = np.empty((iterations, s.size))
    for it in range(iterations):
        adapting = it < burn_in
        for block in blocks:
            proposal = theta.copy()
            proposal[block.index] += block.propose(rng)
            candidate = _safe_log_posterior(target, proposal)
            accept = math.log(rng.uniform()) < candidate - current
            block.proposed += 1
            if accept:
                theta, current = proposal, candidate
                block.accepted += 1
            if adapting:
                rate = TARGET_ACCEPTANCE_1D if block.dim == 1 else TARGET_ACCEPTANCE
                block.log_scale += (float(accept) - rate) / (it + 1) ** 0.6
                block.refresh()

        for name, values, h_index, count in scale_moves:
            if count == 0:
                continue
            u = math.exp(scale_log_sd[name]) * rng.standard_normal()
            proposal = theta.copy()
            proposal[values] *= math.exp(u)
            proposal[h_index] += u
            candidate = _safe_log_posterior(target, proposal)
            accept = math.log(rng.uniform()) < candidate - current + (count - 1) * u
            scale_counts[name][1] += 1
            if accept:
                theta, current = proposal, candidate
                scale_counts[name][0] += 1
            if adapting:
                scale_log_sd[name] += (float(accept) - TARGET_ACCEPTANCE_1D) / (it + 1) ** 0.6

        history[it] = theta
        if adapting and it >= ADAPT_START and (it + 1) % ADAPT_EVERY == 0:
            window = history[it // 2 : it + 1]
            for block in blocks:
                values = window[:, block.index]
                cov = np.atleast_2d(np.cov(values, rowvar=False))
                if np.all(np.isfinite(cov)) and np.all(np.diag(cov) > 0):
                    block.cov = cov
                    block.refresh()

    acceptance = {b.name: b.accepted / max(b.proposed, 1) for b in blocks}
    acceptance.update({name: acc / max(tot, 1) for name, (acc, tot) in scale_counts.items() if tot})
    return history[burn_in:], acceptance


def mcmc_oracle(
    target: PosteriorTarget,
    start: MapFit,
    *,
    chains: int = 4,
    iterations: int = 20_000,
    burn_in_fraction: float = 0.5,
    seed: int = 0,
    max_workers: int = 1,
) -> McmcResult:
    """Run independent chains from overdispersed starts; report R-hat and ESS.

    Chain ``c`` uses the ``c``-th child of ``SeedSequence(seed)``, so a fixed
    seed reproduces every chain.
    """
    burn_in = int(iterations * burn_in_fraction)
    if iterations - burn_in < 4:
        raise ValueError("Too few post-burn-in iterations")
    generators = [np.random.default_rng(child) for child in np.random.SeedSequence(seed).spawn(chains)]

    def run(rng: np.random.Generator) -> tuple[FloatArray, dict[str, float]]:
        return _run_chain(target, start, rng, iterations, burn_in)

    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            results = list(pool.map(run, generators))
    else:
        results = [run(rng) for rng in generators]

    samples = np.stack([r[0] for r in results])
    acceptance = {
        name: float(np.mean([r[1][name] for r in results])) for name in results[0][1]
    }
    rhat, ess = _diagnostics(samples)
    names = target.design.manifest.parameter_names()
    log.info(
        "MCMC oracle: %d chains x %d kept draws, max R-hat %.4f, min ESS %.0f, acceptance %s",
        chains,
        samples.shape[1],
        float(np.nanmax(rhat)) if np.any(np.isfinite(rhat)) else math.nan,
        float(np.nanmin(ess)) if np.any(np.isfinite(ess)) else math.nan,
        {k: round(v, 3) for k, v in acceptance.items()},
    )
    return McmcResult(samples=samples, names=names, acceptance=acceptance, rhat=rhat, ess=ess)
