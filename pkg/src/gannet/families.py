"""Response families for the local scoring loop.

Each family bundles the link function, its inverse, the working response
(adjusted dependent variable), the per-observation IRLS weights, and the
total deviance. Gaussian uses the identity link, so its working response
and weights never change and the whole fit collapses to a single additive
pass; Binomial uses the logit link with the mean clamped away from {0, 1}
to keep weights and deviance finite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigError, DataValidationError

GAUSSIAN = "gaussian"
BINOMIAL = "binomial"


@dataclass(frozen=True)
class Gaussian:
    kind = GAUSSIAN

    def link(self, mu: np.ndarray) -> np.ndarray:
        return np.asarray(mu, dtype=np.float64)

    def inverse_link(self, eta: np.ndarray) -> np.ndarray:
        return np.asarray(eta, dtype=np.float64)

    def adjusted_dependent(self, y, eta, mu) -> np.ndarray:
        return np.asarray(y, dtype=np.float64)

    def irls_weights(self, mu) -> np.ndarray:
        return np.ones_like(np.asarray(mu, dtype=np.float64))

    def deviance(self, y, mu) -> float:
        y = np.asarray(y, dtype=np.float64)
        mu = np.asarray(mu, dtype=np.float64)
        return float(np.sum((y - mu) ** 2))

    def validate_response(self, y) -> None:
        if not np.all(np.isfinite(y)):
            raise DataValidationError("gaussian response contains non-finite values")


@dataclass(frozen=True)
class Binomial:
    """Bernoulli response with logit link (single trial per observation)."""

    mu_clamp: float = 1e-5

    kind = BINOMIAL

    def __post_init__(self):
        if not 0.0 < self.mu_clamp < 0.5:
            raise ConfigError("mu_clamp must lie in (0, 0.5)")

    def clamp(self, mu: np.ndarray) -> np.ndarray:
        return np.clip(mu, self.mu_clamp, 1.0 - self.mu_clamp)

    def link(self, mu: np.ndarray) -> np.ndarray:
        mu = self.clamp(np.asarray(mu, dtype=np.float64))
        return np.log(mu / (1.0 - mu))

    def inverse_link(self, eta: np.ndarray) -> np.ndarray:
        eta = np.asarray(eta, dtype=np.float64)
        # sigmoid, split by sign to avoid overflow in exp
        mu = np.empty_like(eta)
        pos = eta >= 0
        mu[pos] = 1.0 / (1.0 + np.exp(-eta[pos]))
        ex = np.exp(eta[~pos])
        mu[~pos] = ex / (1.0 + ex)
        return self.clamp(mu)

    def adjusted_dependent(self, y, eta, mu) -> np.ndarray:
        y = np.asarray(y, dtype=np.float64)
        eta = np.asarray(eta, dtype=np.float64)
        mu = np.asarray(mu, dtype=np.float64)
        return eta + (y - mu) / (mu * (1.0 - mu))

    def irls_weights(self, mu) -> np.ndarray:
        mu = np.asarray(mu, dtype=np.float64)
        return mu * (1.0 - mu)

    def deviance(self, y, mu) -> float:
        y = np.asarray(y, dtype=np.float64)
        self.validate_response(y)
        mu = self.clamp(np.asarray(mu, dtype=np.float64))
        return float(-2.0 * np.sum(y * np.log(mu) + (1.0 - y) * np.log(1.0 - mu)))

    def validate_response(self, y) -> None:
        y = np.asarray(y)
        if not np.all(np.isin(y, (0.0, 1.0))):
            bad = y[~np.isin(y, (0.0, 1.0))]
            raise DataValidationError(
                f"binomial response must be 0/1; found value {bad.flat[0]!r}"
            )


Family = Gaussian | Binomial

FAMILY_NAMES = (GAUSSIAN, BINOMIAL)


def make_family(name: str, mu_clamp: float = 1e-5) -> Family:
    """Build a family from its config/CLI name ('gaussian' or 'binomial')."""
    if name == GAUSSIAN:
        return Gaussian()
    if name == BINOMIAL:
        return Binomial(mu_clamp=mu_clamp)
    raise ConfigError(f"unknown family {name!r}; expected one of {FAMILY_NAMES}")
