"""Prior specification and its log-density pieces.

``sigma`` priors are penalised-complexity exponentials on the standard
deviation, P(sigma > u) = alpha, evaluated on the log-sigma scale so the
Jacobian ``+ log sigma`` is included.
"""

from __future__ import annotations

import math

from pydantic import BaseModel, ConfigDict, Field

LOG_2PI = math.log(2.0 * math.pi)


class PriorSpec(BaseModel):
    """Priors of the ITS model.

    ``intercept_variance=None`` is the improper flat intercept; a finite value
    makes prior-only problems proper.
    """

    model_config = ConfigDict(frozen=True)

    fixed_effect_variance: float = Field(default=1000.0, gt=0.0)
    intercept_variance: float | None = Field(default=None, gt=0.0)
    pc_upper: float = Field(default=1.0, gt=0.0)
    pc_alpha: float = Field(default=0.1, gt=0.0, lt=1.0)
    sum_to_zero_precision: float = Field(default=1e6, gt=0.0)

    @property
    def pc_rate(self) -> float:
        """lambda = -ln(alpha) / u."""
        return -math.log(self.pc_alpha) / self.pc_upper

    def pc_sigma_density(self, sigma: float) -> float:
        """Exponential density of sigma itself (zero for sigma < 0)."""
        if sigma < 0:
            return 0.0
        lam = self.pc_rate
        return lam * math.exp(-lam * sigma)

    def pc_log_density(self, log_sigma: float) -> float:
        """log p(h) for h = log sigma: log(lambda) - lambda * e^h + h."""
        lam = self.pc_rate
        return math.log(lam) - lam * math.exp(log_sigma) + log_sigma

    def manifest_entry(self) -> dict[str, object]:
        return {
            "intercept": "flat" if self.intercept_variance is None else f"normal(0, {self.intercept_variance:g})",
            "fixed_effect_prior": "variance",
            "fixed_effect_variance": self.fixed_effect_variance,
            "pc_upper": self.pc_upper,
            "pc_alpha": self.pc_alpha,
            "pc_rate": self.pc_rate,
            "sum_to_zero_precision": self.sum_to_zero_precision,
        }
