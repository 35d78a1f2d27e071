"""Tests for the log-posterior, its derivatives and the priors."""

from __future__ import annotations

import math
from decimal import Decimal, localcontext

import numpy as np
import pytest
from scipy import integrate

from policy_its.core.exceptions import ArtifactError, NumericalError
from policy_its.inference.oracle import check_gradient, random_point
from policy_its.model.design import Design
from policy_its.model.layout import LayoutManifest
from policy_its.model.params import ParameterVector
from policy_its.model.posterior import PosteriorTarget, gradient, log_posterior
from policy_its.model.priors import PriorSpec


def _numeric_hessian(target: PosteriorTarget, theta: np.ndarray, step: float = 1e-6) -> np.ndarray:
    size = theta.shape[0]
    hess = np.empty((size, size))
    for j in range(size):
        up, down = theta.copy(), theta.copy()
        up[j] += step
        down[j] -= step
        hess[:, j] = (target.gradient(up) - target.gradient(down)) / (2.0 * step)
    return hess


class TestPcPrior:
    @pytest.mark.parametrize(("upper", "alpha"), [(1.0, 0.1), (0.5, 0.01), (2.0, 0.3)])
    def test_tail_mass_above_upper(self, upper: float, alpha: float) -> None:
        spec = PriorSpec(pc_upper=upper, pc_alpha=alpha)
        tail, _ = integrate.quad(spec.pc_sigma_density, upper, np.inf)
        assert tail == pytest.approx(alpha, abs=1e-6)

    def test_rate(self) -> None:
        assert PriorSpec().pc_rate == pytest.approx(-math.log(0.1))

    def test_log_sigma_density_integrates_to_one(self) -> None:
        spec = PriorSpec()
        total, _ = integrate.quad(lambda h: math.exp(spec.pc_log_density(h)), -40.0, 10.0, limit=200)
        assert total == pytest.approx(1.0, abs=1e-6)

    def test_density_zero_below_zero(self) -> None:
        assert PriorSpec().pc_sigma_density(-0.5) == 0.0


class TestPosteriorTarget:
    def test_terms_sum_to_log_posterior(self, small_design: Design) -> None:
        target = PosteriorTarget(small_design)
        theta = random_point(target, np.random.default_rng(1))
        assert sum(target.terms(theta).values()) == pytest.approx(target.log_posterior(theta))

    def test_gradient_matches_finite_differences(self, small_design: Design) -> None:
        check = check_gradient(PosteriorTarget(small_design), points=5, seed=2)
        assert check.points == 5
        assert check.passed(1e-5), check.worst_parameter

    def test_hessian_matches_gradient_differences(self, small_design: Design) -> None:
        target = PosteriorTarget(small_design)
        theta = random_point(target, np.random.default_rng(4))
        analytic = target.hessian(theta)
        assert np.allclose(analytic, analytic.T)
        np.testing.assert_allclose(analytic, _numeric_hessian(target, theta), rtol=1e-4, atol=1e-3)

    def test_weights_scale_the_likelihood(self, small_design: Design) -> None:
        theta = random_point(PosteriorTarget(small_design), np.random.default_rng(5))
        single = PosteriorTarget(small_design).terms(theta)["loglik"]
        doubled = PosteriorTarget(small_design.with_weights(2.0 * small_design.weights)).terms(theta)["loglik"]
        assert doubled == pytest.approx(2.0 * single)

    def test_flat_intercept_leaves_prior_free(self, small_design: Design) -> None:
        target = PosteriorTarget(small_design)
        theta = np.zeros(target.size)
        shifted = theta.copy()
        shifted[0] = 50.0
        assert target.terms(theta)["beta_prior"] == pytest.approx(target.terms(shifted)["beta_prior"])

    def test_proper_intercept_prior(self, small_design: Design) -> None:
        target = PosteriorTarget(small_design, PriorSpec(intercept_variance=4.0))
        theta = np.zeros(target.size)
        shifted = theta.copy()
        shifted[0] = 2.0
        assert target.terms(theta)["beta_prior"] - target.terms(shifted)["beta_prior"] == pytest.approx(0.5)

    def test_non_finite_value_names_the_term(self, small_design: Design) -> None:
        target = PosteriorTarget(small_design)
        theta = np.zeros(target.size)
        theta[0] = np.nan
        with pytest.raises(NumericalError) as excinfo:
            target.log_posterior(theta)
        assert excinfo.value.term == "loglik"
        assert excinfo.value.exit_code == 3

    def test_wrong_vector_length(self, small_design: Design) -> None:
        with pytest.raises(ArtifactError):
            PosteriorTarget(small_design).log_posterior(np.zeros(4))


class TestFunctionalSurface:
    def test_matches_target(self, small_design: Design) -> None:
        target = PosteriorTarget(small_design)
        theta = random_point(target, np.random.default_rng(6))
        params = ParameterVector.from_array(theta, small_design.slices)
        assert log_posterior(params, small_design) == pytest.approx(target.log_posterior(theta))
        np.testing.assert_allclose(gradient(params, small_design), target.gradient(theta))

    def test_explicit_outcomes_override_design(self, small_design: Design) -> None:
        params = ParameterVector.zeros(small_design.slices)
        flipped = 1.0 - small_design.outcomes
        # At mu = 0 every row contributes -w log 2 whatever its outcome.
        assert log_posterior(params, small_design, outcomes=flipped) == pytest.approx(
            log_posterior(params, small_design)
        )

    def test_bad_weights(self, small_design: Design) -> None:
        params = ParameterVector.zeros(small_design.slices)
        with pytest.raises(NumericalError) as excinfo:
            log_posterior(params, small_design, weights=np.zeros(small_design.n))
        assert excinfo.value.term == "weights"
        with pytest.raises(ArtifactError):
            log_posterior(params, small_design, weights=np.ones(3))


# ── Extended-precision reference ────────────────────────────────────

PI_50 = Decimal("3.14159265358979323846264338327950288419716939937510")


def _five_row_design() -> Design:
    manifest = LayoutManifest(
        columns=["(Intercept)", "x"],
        reference_levels={},
        level_sets={},
        time_years=[2014, 2015],
        area_ids=["A01", "A02"],
    )
    return Design(
        manifest=manifest,
        X=np.column_stack([np.ones(5), [-1.0, 0.5, 2.0, 0.0, 1.5]]),
        time_index=np.array([0, 1, 0, 1, 1]),
        area_index=np.array([0, 0, 1, 1, 0]),
        outcomes=np.array([1.0, 0.0, 1.0, 0.0, 1.0]),
        weights=np.array([1.0, 0.5, 2.0, 1.25, 0.75]),
    )


def _reference_log_posterior(design: Design, theta: np.ndarray) -> Decimal:
    """Every term evaluated in 50-digit decimal arithmetic."""
    with localcontext() as ctx:
        ctx.prec = 50
        d = [Decimal(float(v)) for v in theta]
        beta, gamma, delta, h_gamma, h_delta = d[0:2], d[2:4], d[4:6], d[6], d[7]
        one, half = Decimal(1), Decimal("0.5")
        log_2pi = (2 * PI_50).ln()
        loglik = Decimal(0)
        for i in range(design.n):
            x = Decimal(float(design.X[i, 1]))
            mu = beta[0] + beta[1] * x + gamma[int(design.time_index[i])] + delta[int(design.area_index[i])]
            y, w = Decimal(float(design.outcomes[i])), Decimal(float(design.weights[i]))
            loglik += w * (y * mu - (one + mu.exp()).ln())
        variance = Decimal(1000)
        beta_prior = -half * beta[1] ** 2 / variance - half * (log_2pi + variance.ln())

        def block(values: list[Decimal], h: Decimal) -> Decimal:
            k = len(values)
            return -k * h - half * k * log_2pi - half * (-2 * h).exp() * sum(v**2 for v in values)

        lam = Decimal(10).ln()

        def pc(h: Decimal) -> Decimal:
            return lam.ln() - lam * h.exp() + h

        total = loglik + beta_prior + block(gamma, h_gamma) + block(delta, h_delta) + pc(h_gamma) + pc(h_delta)
        return +total


class TestExtendedPrecision:
    def test_five_rows_match_decimal_reference(self) -> None:
        design = _five_row_design()
        # Zero-sum year and area effects, so the penalty term is exactly zero.
        theta = np.array([-0.5, 0.75, 0.25, -0.25, 0.5, -0.5, -0.5, 0.25])
        value = PosteriorTarget(design).log_posterior(theta)
        assert value == pytest.approx(float(_reference_log_posterior(design, theta)), rel=1e-12)

    def test_extreme_predictor_stays_finite(self) -> None:
        design = _five_row_design()
        theta = np.zeros(8)
        theta[0] = 700.0
        terms = PosteriorTarget(design).terms(theta)
        assert math.isfinite(terms["loglik"])
        # Rows with y = 0 carry weight 0.5 + 1.25.
        assert terms["loglik"] == pytest.approx(-700.0 * 1.75, rel=1e-12)
        theta[0] = -700.0
        assert PosteriorTarget(design).terms(theta)["loglik"] == pytest.approx(-700.0 * 3.75, rel=1e-12)
