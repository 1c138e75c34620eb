"""Gaussian variance mixtures ``X = mu + sqrt(W) Z`` with ``W`` observed.

The MLE of ``mu`` is the precision-weighted mean. When the CDF of ``W`` is
regularly varying at zero with index ``beta <= 1``, ``E[1/W]`` is infinite
and the estimator converges faster than ``n**-0.5``. This package provides
the mixing families, the estimator, the rate functions ``B`` and ``A``, the
stable limit laws, and a Monte Carlo engine that checks the rates.
"""
from ._backend import NAME as BACKEND
from .errors import DomainError, NumericError
from .estimator import EstimateReport, conditional_standardize, fisher_diagnostic, mle
from .mixture import Observation, SampleSet, joint_density, log_likelihood, sample_pairs, score, sufficient_statistic
from .ratefns import condition_e_inv_w, karamata_k, rate_a, rate_b, rv_index_estimate, slow_variation_l
from .stablelim import limit_cdf, sample_scaled_error_limit, sample_subordinator
from .wfamily import MixingFamily, PointMass, lp, parse_family, rp

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "DomainError",
    "NumericError",
    "EstimateReport",
    "conditional_standardize",
    "fisher_diagnostic",
    "mle",
    "Observation",
    "SampleSet",
    "joint_density",
    "log_likelihood",
    "sample_pairs",
    "score",
    "sufficient_statistic",
    "condition_e_inv_w",
    "karamata_k",
    "rate_a",
    "rate_b",
    "rv_index_estimate",
    "slow_variation_l",
    "limit_cdf",
    "sample_scaled_error_limit",
    "sample_subordinator",
    "MixingFamily",
    "PointMass",
    "lp",
    "parse_family",
    "rp",
]
