import math

import numpy as np
import pytest
from scipy import special, stats

from gvmix.errors import DomainError
from gvmix.experiment import ks_two_sample
from gvmix.stablelim import (
    LimitCDF,
    laplace_transform,
    limit_cdf,
    sample_scaled_error_limit,
    sample_subordinator,
    subordinator_scale,
)

N = 1_000_000


@pytest.fixture(scope="module")
def draws():
    return {beta: sample_subordinator(beta, N, seed=[21, int(100 * beta)]).draws for beta in (0.3, 0.5, 0.7, 0.9)}


def test_laplace_example(draws):
    e = np.exp(-draws[0.5])
    se = e.std(ddof=1) / math.sqrt(N)
    assert math.exp(-math.sqrt(math.pi)) == pytest.approx(0.1699155, abs=1e-7)
    assert abs(e.mean() - math.exp(-math.sqrt(math.pi))) <= 3 * se


@pytest.mark.parametrize("beta", [0.3, 0.5, 0.7, 0.9])
@pytest.mark.parametrize("lam", [0.5, 1.0, 2.0])
def test_laplace_grid(draws, beta, lam):
    e = np.exp(-lam * draws[beta])
    se = e.std(ddof=1) / math.sqrt(N)
    target = math.exp(-math.gamma(1 - beta) * lam**beta)
    assert float(laplace_transform(beta, lam)) == pytest.approx(target, rel=1e-15)
    assert abs(e.mean() - target) <= 3 * se


@pytest.mark.parametrize("beta", [0.3, 0.5, 0.7, 0.9])
def test_laplace_at_zero_and_positivity(draws, beta):
    assert np.mean(np.exp(-0.0 * draws[beta])) == 1.0
    assert float(laplace_transform(beta, 0.0)) == 1.0
    assert np.all(draws[beta] > 0) and np.all(np.isfinite(draws[beta]))


def test_half_stable_closed_form():
    # beta = 1/2: E exp(-lam U) = exp(-sqrt(pi lam)) is the Levy law P(U <= x) = erfc(sqrt(pi / (4 x)))
    u = sample_subordinator(0.5, 200_000, seed=5).draws
    d = stats.kstest(u, lambda x: special.erfc(np.sqrt(math.pi / (4 * x)))).statistic
    assert d <= 1.63 / math.sqrt(u.size)


@pytest.mark.parametrize("beta", [0.3, 0.5, 0.7])
def test_tail_index(draws, beta):
    u = np.sort(draws[beta])
    top = u[-N // 10 :]
    # survival over the top decade of order statistics
    surv = (N - np.arange(N - top.size, N)) / N
    k = slice(0, top.size - 100)
    slope = np.polyfit(np.log(top[k]), np.log(surv[k]), 1)[0]
    assert slope == pytest.approx(-beta, abs=0.05)


def test_subordinator_scale():
    assert subordinator_scale(0.5) == pytest.approx(math.pi, rel=1e-14)
    assert subordinator_scale(0.3) == pytest.approx(math.gamma(0.7) ** (1 / 0.3), rel=1e-14)


def test_scaled_error_symmetry():
    x = sample_scaled_error_limit(0.5, N, seed=8).draws
    assert abs(np.median(x)) <= 4 * 1.2533 / math.sqrt(N)
    assert abs(np.mean(x > 0) - 0.5) <= 3 / (2 * math.sqrt(N))


def test_scaled_error_two_seed_ks():
    a = sample_scaled_error_limit(0.5, 20_000, seed=1).draws
    b = sample_scaled_error_limit(0.5, 20_000, seed=2).draws
    crit = 1.63 * math.sqrt(2 / 20_000)
    assert ks_two_sample(a, b) <= crit


def test_determinism_and_kind():
    a = sample_subordinator(0.7, 1000, seed=3)
    assert a.kind == "subordinator" and len(a) == 1000 and a.seed == 3
    assert np.array_equal(a.draws, sample_subordinator(0.7, 1000, seed=3).draws)
    assert sample_scaled_error_limit(0.7, 10, seed=3).kind == "scaled_error_limit"


@pytest.mark.parametrize("beta", [0.0, 1.0, -0.5, 1.5, math.nan])
def test_beta_domain(beta):
    with pytest.raises(DomainError):
        sample_subordinator(beta, 10, seed=1)
    with pytest.raises(DomainError):
        sample_scaled_error_limit(beta, 10, seed=1)


def test_limit_cdf_properties():
    assert limit_cdf(0.5, 0.0, m=20_000, seed=1) == 0.5
    assert limit_cdf(0.5, 1e6, m=20_000, seed=1) == pytest.approx(1.0, abs=1e-12)
    xs = np.linspace(-6, 6, 241)
    f = limit_cdf(0.5, xs, m=20_000, seed=1)
    assert np.all(np.diff(f) >= 0)
    for x in (0.1, 0.7, 2.5, 30.0):
        assert limit_cdf(0.5, x, m=20_000, seed=1) + limit_cdf(0.5, -x, m=20_000, seed=1) == 1.0


def test_limit_cdf_matches_draws():
    x = sample_scaled_error_limit(0.7, 2000, seed=99).draws
    F = LimitCDF(0.7, m=20_000, seed=4)
    d = stats.kstest(x, F).statistic
    assert d <= 1.63 / math.sqrt(x.size) + 1.63 / math.sqrt(F.m)


def test_limit_cdf_needs_enough_draws():
    with pytest.raises(DomainError):
        LimitCDF(0.5, m=100)
