import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special, stats

from gvmix.errors import DomainError
from gvmix.estimator import conditional_standardize, fisher_diagnostic, mle
from gvmix.experiment import ks_one_sample
from gvmix.mixture import SampleSet, sample_pairs
from gvmix.wfamily import lp, rp


def test_mle_examples():
    assert mle(SampleSet([1.0, 3.0], [1.0, 1.0])).mu_hat == 2.0
    assert mle(SampleSet([0.0, 4.0], [1.0, 4.0])).mu_hat == pytest.approx(0.8, rel=1e-15)
    r = mle(SampleSet([5.0], [2.0]))
    assert (r.mu_hat, r.s_n, r.n, r.fisher_proxy) == (5.0, 0.5, 1, 0.5)


def test_mle_rejects_empty():
    with pytest.raises(DomainError):
        mle(SampleSet([], []))


def test_report_invariants():
    r = mle(sample_pairs(rp(0.5), 1000, seed=1))
    assert r.s_n == pytest.approx(r.n * r.fisher_proxy, rel=1e-15)
    assert set(r.to_dict()) == {"mu_hat", "s_n", "n", "fisher_proxy"}


finite = st.floats(-1e6, 1e6, allow_nan=False)
positive = st.floats(1e-6, 1e6, allow_nan=False)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(finite, positive), min_size=1, max_size=40))
def test_mle_is_convex_combination(pairs):
    s = SampleSet.from_observations(pairs)
    m = mle(s).mu_hat
    assert s.x.min() <= m <= s.x.max()


@settings(max_examples=200, deadline=None)
@given(
    st.lists(st.tuples(st.integers(-1000, 1000), st.integers(0, 40)), min_size=1, max_size=30),
    st.integers(-50, 50),
    st.integers(-10, 10),
)
def test_mle_scale_equivariance(pairs, shift, k):
    # dyadic data keep the shift and rescaling exact in binary floating point
    x = np.array([p[0] / 8 for p in pairs])
    w = np.array([2.0 ** (p[1] - 20) for p in pairs])
    base = mle(SampleSet(x, w))
    shifted = mle(SampleSet(x + shift, w))
    assert shifted.mu_hat == pytest.approx(base.mu_hat + shift, abs=4e-16 * (abs(base.mu_hat) + abs(shift)))
    scaled = mle(SampleSet(x, w * 2.0**k))
    assert scaled.mu_hat == base.mu_hat
    assert scaled.s_n == base.s_n / 2.0**k


def _fraction_mle(x, w):
    num = sum(Fraction(xi) / Fraction(wi) for xi, wi in zip(x, w))
    den = sum(1 / Fraction(wi) for wi in w)
    return float(num / den), float(den)


@pytest.mark.parametrize("seed", range(5))
def test_mle_adversarial_against_exact_oracle(seed):
    rng = np.random.default_rng(seed)
    n = 2000
    w = 10.0 ** rng.uniform(-12, 12, n)
    x = rng.normal(0.0, 1.0, n) * 10.0 ** rng.uniform(-6, 6, n)
    # cancelling heavy terms around a tiny signal
    x[:20] = 1e6
    x[20:40] = -1e6
    w[:40] = 1e-12
    mu, s_n = _fraction_mle(x, w)
    r = mle(SampleSet(x, w))
    assert r.mu_hat == pytest.approx(mu, rel=1e-12, abs=1e-300)
    assert r.s_n == pytest.approx(s_n, rel=1e-15)


def test_standardize_degenerate_and_missing_mu():
    s = SampleSet([0.7, 0.7, 0.7], [1.0, 1e-8, 5.0], true_mu=0.7)
    assert conditional_standardize(s) == 0.0
    with pytest.raises(DomainError):
        conditional_standardize(SampleSet([1.0], [1.0]))


@pytest.mark.parametrize("n", [1, 3, 10])
@pytest.mark.parametrize("fam", [rp(0.5), lp(1.0, -1.0)], ids=lambda f: f.spec)
def test_exact_conditional_normality(n, fam):
    R = 4000
    z = np.array([conditional_standardize(sample_pairs(fam, n, 1.25, seed=[77, n, r]), 1.25) for r in range(R)])
    d = ks_one_sample(z, special.ndtr)
    assert d == pytest.approx(stats.kstest(z, "norm").statistic, abs=1e-12)
    assert d <= 1.63 / math.sqrt(R)


def test_fisher_diagnostic_rp1_grows_like_log_n():
    grid = [2**k for k in range(8, 21)]
    runs = [fisher_diagnostic(rp(1.0), grid, seed=[3, k]) for k in range(16)]
    assert all(fd.verdict == "infinite" for fd in runs)
    # 1/W has a Cauchy-type tail, so one path is noisy; the median across paths
    # tracks the truncated mean log(1 + T) with T of order n
    med = np.median([fd.running_mean for fd in runs], axis=0)
    fit = stats.linregress(np.log(grid), med)
    assert fit.rvalue**2 > 0.9
    assert fit.slope == pytest.approx(1.0, abs=0.25)


def test_fisher_diagnostic_verdicts():
    assert fisher_diagnostic(rp(0.3), [10, 100], seed=1).verdict == "infinite"
    fin = fisher_diagnostic(lp(1.0, -2.0), [100, 1000, 10000], seed=1)
    assert fin.verdict == "finite"
    # K(T) -> 2 for gamma = -2, i.e. E[1/W] = 2
    assert fin.running_mean[-1] == pytest.approx(2.0, rel=0.1)
    num = fisher_diagnostic(lp(1.0, -2.0), [100], seed=1, method="numeric")
    assert num.verdict == "finite" and num.evidence.method == "numeric"


def test_fisher_diagnostic_rejects_bad_grid():
    for grid in ([], [10, 5], [0, 10], [10, 10]):
        with pytest.raises(DomainError):
            fisher_diagnostic(rp(1.0), grid, seed=1)
