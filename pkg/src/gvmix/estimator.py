"""Closed-form MLE of the location and the precision sum ``S_n``.

Given the observed variances the log-likelihood is a concave quadratic in
``mu``, maximized by the precision-weighted mean

    mu_hat = sum(x_i / w_i) / sum(1 / w_i).

Conditionally on the ``w_i`` it is exactly ``N(mu, 1 / S_n)`` with
``S_n = sum(1 / w_i)``, whatever ``n`` is.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import DomainError
from .mixture import SampleSet
from .ratefns import EInvWVerdict, condition_e_inv_w
from .wfamily import MixingFamily

__all__ = [
    "EstimateReport",
    "FisherDiagnostic",
    "mle",
    "conditional_standardize",
    "fisher_diagnostic",
]


@dataclass(frozen=True)
class EstimateReport:
    mu_hat: float
    s_n: float
    n: int
    fisher_proxy: float

    def to_dict(self) -> dict:
        return asdict(self)


def mle(sample: SampleSet) -> EstimateReport:
    """Precision-weighted mean with correctly rounded sums.

    ``1/w_i`` routinely spans many orders of magnitude here, so naive
    accumulation would drop the small terms.
    """
    n = len(sample)
    if n == 0:
        raise DomainError("MLE of an empty sample")
    x, w = sample.x, sample.w
    if np.any(w <= 0.0):
        raise DomainError("every w_i must be positive")
    s_n = math.fsum(1.0 / w)
    mu_hat = math.fsum(x / w) / s_n
    # a convex combination of the x_i; clip away rounding at the ulp level
    mu_hat = min(max(mu_hat, float(x.min())), float(x.max()))
    return EstimateReport(mu_hat=mu_hat, s_n=s_n, n=n, fisher_proxy=s_n / n)


def conditional_standardize(sample: SampleSet, true_mu: float | None = None) -> float:
    """``sqrt(S_n) * (mu_hat - mu)``, exactly standard normal for every ``n``."""
    if true_mu is None:
        true_mu = sample.true_mu
    if true_mu is None:
        raise DomainError("true mu is required (pass it or attach it to the sample)")
    report = mle(sample)
    return math.sqrt(report.s_n) * (report.mu_hat - float(true_mu))


@dataclass
class FisherDiagnostic:
    """Running mean of ``1/W_i`` on a grid of ``n``, next to the verdict on ``E[1/W]``."""

    n_grid: list
    running_mean: list
    verdict: str
    evidence: EInvWVerdict = field(repr=False)
    seed: object = None


def fisher_diagnostic(family: MixingFamily, n_grid, seed=None, method: str = "auto") -> FisherDiagnostic:
    """Track the sample Fisher information per observation, ``mean(1/W_i)``.

    A single stream of ``max(n_grid)`` draws is used so the running means are
    nested. The verdict comes from :func:`gvmix.ratefns.condition_e_inv_w`.
    """
    grid = [int(n) for n in n_grid]
    if not grid or any(n < 1 for n in grid) or any(b <= a for a, b in zip(grid, grid[1:])):
        raise DomainError("n_grid must be a nonempty increasing list of positive counts")
    inv_w = 1.0 / family.sample(grid[-1], seed)
    partials = []
    means = []
    start = 0
    for n in grid:
        partials.append(math.fsum(inv_w[start:n]))
        means.append(math.fsum(partials) / n)
        start = n
    evidence = condition_e_inv_w(family, method)
    return FisherDiagnostic(grid, means, evidence.verdict, evidence, seed)
