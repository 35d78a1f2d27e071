"""MAP + Laplace fitting with a weighted hyper grid, posterior draws and the MCMC oracle."""

from policy_its.inference.fitted import FitArtifact, FittedPosterior, fit_posterior
from policy_its.inference.hyper import GridPoint, HyperGrid, optimize_hyper
from policy_its.inference.laplace import MapFit, fit_map
from policy_its.inference.mcmc import McmcResult, mcmc_oracle
from policy_its.inference.oracle import GradientCheck, OracleComparison, check_gradient, compare_with_oracle
from policy_its.inference.sampling import draw_posterior

__all__ = [
    "FitArtifact",
    "FittedPosterior",
    "GradientCheck",
    "GridPoint",
    "HyperGrid",
    "MapFit",
    "McmcResult",
    "OracleComparison",
    "check_gradient",
    "compare_with_oracle",
    "draw_posterior",
    "fit_map",
    "fit_posterior",
    "mcmc_oracle",
    "optimize_hyper",
]
