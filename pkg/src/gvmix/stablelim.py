"""Limit laws: the positive stable subordinator and ``Z / sqrt(U)``.

The subordinator ``U`` of index ``beta`` is normalized by its Laplace
transform ``E exp(-lam U) = exp(-Gamma(1 - beta) lam**beta)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special

from .errors import DomainError
from .wfamily import open_uniform

__all__ = [
    "LimitLawSample",
    "LimitCDF",
    "subordinator_scale",
    "laplace_transform",
    "sample_subordinator",
    "sample_scaled_error_limit",
    "limit_cdf",
]

SUBORDINATOR = "subordinator"
SCALED_ERROR_LIMIT = "scaled_error_limit"


@dataclass(frozen=True, eq=False)
class LimitLawSample:
    beta: float
    draws: np.ndarray
    kind: str
    seed: object = None

    def __len__(self) -> int:
        return self.draws.size


def _check_beta(beta: float) -> float:
    beta = float(beta)
    if not 0.0 < beta < 1.0:
        raise DomainError(f"subordinator index must lie in (0, 1), got {beta}")
    return beta


def subordinator_scale(beta: float) -> float:
    """``Gamma(1 - beta)**(1/beta)``: maps the standard positive stable law onto ``U``."""
    beta = _check_beta(beta)
    return math.exp(math.lgamma(1.0 - beta) / beta)


def laplace_transform(beta: float, lam):
    """``exp(-Gamma(1 - beta) * lam**beta)``."""
    beta = _check_beta(beta)
    return np.exp(-math.gamma(1.0 - beta) * np.power(lam, beta))


def _draw_subordinator(rng: np.random.Generator, beta: float, n: int) -> np.ndarray:
    # Kanter: S = (a(theta) / xi)**((1 - beta)/beta) has E exp(-lam S) = exp(-lam**beta),
    # with a(theta) = [sin(beta th)**beta sin((1-beta) th)**(1-beta) / sin th]**(1/(1-beta)).
    # Evaluated in log space; the 1/(1-beta) power overflows as beta -> 1.
    theta = math.pi * open_uniform(rng, n)
    xi = rng.standard_exponential(n)
    log_a_pow = (
        beta * np.log(np.sin(beta * theta))
        + (1.0 - beta) * np.log(np.sin((1.0 - beta) * theta))
        - np.log(np.sin(theta))
    ) / beta
    log_s = log_a_pow - (1.0 - beta) / beta * np.log(xi)
    return np.exp(log_s + math.lgamma(1.0 - beta) / beta)


def sample_subordinator(beta: float, n: int, seed=None) -> LimitLawSample:
    """``n`` draws of ``U_beta``."""
    beta = _check_beta(beta)
    if n < 0:
        raise DomainError("n must be nonnegative")
    rng = np.random.default_rng(seed)
    return LimitLawSample(beta, _draw_subordinator(rng, beta, n), SUBORDINATOR, seed)


def sample_scaled_error_limit(beta: float, n: int, seed=None) -> LimitLawSample:
    """``n`` draws of ``Z / sqrt(U_beta)`` with ``Z`` standard normal, independent of ``U``."""
    beta = _check_beta(beta)
    if n < 0:
        raise DomainError("n must be nonnegative")
    rng = np.random.default_rng(seed)
    u = _draw_subordinator(rng, beta, n)
    z = rng.standard_normal(n)
    return LimitLawSample(beta, z / np.sqrt(u), SCALED_ERROR_LIMIT, seed)


class LimitCDF:
    """Reference CDF of ``Z / sqrt(U_beta)`` as a normal scale mixture.

    ``P(Z / sqrt(U) <= x) = E[Phi(x sqrt(U))]``, averaged over a fixed cache
    of ``m`` subordinator draws. The average is correctly rounded
    (``math.fsum``), so the estimate is monotone in ``x``; negative ``x`` is
    evaluated by reflection, which makes ``F(x) + F(-x) == 1`` exact.
    """

    def __init__(self, beta: float, m: int = 100_000, seed=None):
        if m < 10_000:
            raise DomainError("reference CDF needs at least 1e4 cached draws")
        self.beta = _check_beta(beta)
        self.m = int(m)
        self.seed = seed
        self._root_u = np.sqrt(sample_subordinator(beta, m, seed).draws)

    def _upper(self, x: float) -> float:
        return math.fsum(special.ndtr(x * self._root_u)) / self.m

    def __call__(self, x):
        scalar = np.ndim(x) == 0
        xs = np.atleast_1d(np.asarray(x, dtype=np.float64))
        out = np.empty(xs.shape)
        for i, xi in enumerate(xs.flat):
            if math.isnan(xi):
                out.flat[i] = math.nan
            elif xi >= 0.0:
                out.flat[i] = self._upper(xi)
            else:
                out.flat[i] = 1.0 - self._upper(-xi)
        return float(out[0]) if scalar else out.reshape(np.shape(x))


@lru_cache(maxsize=16)
def _cached_cdf(beta: float, m: int, seed) -> LimitCDF:
    return LimitCDF(beta, m, seed)


def limit_cdf(beta: float, x, m: int = 100_000, seed=0):
    """Monte Carlo ``P(Z / sqrt(U_beta) <= x)`` over a cached draw set keyed by ``(beta, m, seed)``."""
    key = tuple(seed) if isinstance(seed, (list, tuple)) else seed
    return _cached_cdf(float(beta), int(m), key)(x)
