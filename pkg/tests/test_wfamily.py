import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate, optimize
from scipy.stats import kstest

from gvmix.errors import DomainError
from gvmix.wfamily import LP, RP, MixingFamily, PointMass, cdf, lp, parse_family, pdf, quantile, rp, sample_w


def test_cdf_examples():
    assert cdf(rp(1.0), 1.0) == pytest.approx(0.5, abs=1e-15)
    assert cdf(rp(0.5), 4.0) == pytest.approx(2.0 / 3.0, rel=1e-14)
    assert cdf(lp(1.0, -1.0), 1.0) == 1.0
    assert cdf(lp(1.0, -1.0), math.exp(-1.0)) == pytest.approx(math.exp(-1.0) / 2.0, rel=1e-14)


def test_cdf_matches_integrated_density():
    # independent route: integrate g_W from 0
    val, _ = integrate.quad(lambda u: pdf(rp(0.5), u), 0.0, 4.0, epsabs=0, epsrel=1e-12, limit=200)
    assert val == pytest.approx(2.0 / 3.0, rel=1e-9)
    val, _ = integrate.quad(lambda u: pdf(lp(1.0, -1.0), u), 0.0, math.exp(-1.0), epsabs=0, epsrel=1e-12, limit=200)
    assert val == pytest.approx(math.exp(-1.0) / 2.0, rel=1e-9)


def test_pdf_examples():
    assert pdf(rp(1.0), 1.0) == pytest.approx(0.25, rel=1e-15)
    assert pdf(lp(1.0, -1.0), 1.0) == pytest.approx(2.0, rel=1e-15)
    assert pdf(lp(1.0, -1.0), 1.5) == 0.0


def test_pdf_normalized(family):
    f = lambda u: pdf(family, u)  # noqa: E731
    head, _ = integrate.quad(f, 0.0, 1.0, epsabs=0, epsrel=1e-11, limit=400)
    total = head
    if family.kind == RP:
        # tail on u = e^v
        tail, _ = integrate.quad(lambda v: f(math.exp(v)) * math.exp(v), 0.0, 700.0, epsabs=0, epsrel=1e-11, limit=400)
        total += tail
    assert total == pytest.approx(1.0, abs=1e-8)


def test_pdf_is_derivative_of_cdf(family):
    for u in np.geomspace(1e-3, 0.9 * family.support_upper if family.kind == LP else 50.0, 25):
        h = 1e-6 * u
        fd = (cdf(family, u + h) - cdf(family, u - h)) / (2 * h)
        assert fd == pytest.approx(pdf(family, u), rel=1e-6)


def test_cdf_strictly_increasing(family):
    upper = 0.999 if family.kind == LP else 1e6
    u = np.geomspace(1e-12, upper, 2000)
    g = cdf(family, u)
    assert np.all(np.diff(g) > 0)
    assert np.all(pdf(family, u) >= 0)


def test_rp_cdf_tends_to_one():
    assert cdf(rp(0.5), 1e300) == pytest.approx(1.0)
    assert cdf(rp(1.0), 1e12) == pytest.approx(1.0, abs=1e-11)


def test_quantile_examples():
    for beta in (0.3, 0.5, 1.0):
        assert quantile(rp(beta), 0.5) == pytest.approx(1.0, rel=1e-15)
    assert quantile(rp(0.5), 2.0 / 3.0) == pytest.approx(4.0, rel=1e-13)
    fam = lp(1.0, -1.0)
    v = math.exp(-1.0) / 2.0
    # oracle: bracketed root of G(u) = v
    oracle = optimize.brentq(lambda u: cdf(fam, u) - v, 1e-12, 1.0, xtol=1e-16, rtol=1e-15)
    assert oracle == pytest.approx(math.exp(-1.0), rel=1e-12)
    assert quantile(fam, v) == pytest.approx(oracle, rel=1e-12)


@pytest.mark.parametrize("beta", [0.3, 0.5, 0.7, 1.0])
@pytest.mark.parametrize("gamma", [None, -1.0, -0.5, 0.0, 0.5])
def test_quantile_round_trip(beta, gamma):
    if gamma is not None and gamma >= beta:
        pytest.skip("gamma must stay below beta")
    fam = rp(beta) if gamma is None else lp(beta, gamma)
    v = np.linspace(0.001, 0.999, 999)
    h = quantile(fam, v)
    assert np.all(np.abs(cdf(fam, h) - v) <= 1e-10 * v)
    assert np.all(np.diff(h) > 0)


@given(st.floats(1e-30, 1 - 1e-16), st.sampled_from([rp(0.3), rp(1.0), lp(1.0, -1.0), lp(0.6, 0.4), lp(0.9, -3.0)]))
def test_quantile_round_trip_property(v, fam):
    u = quantile(fam, v)
    assert 0.0 < u <= fam.support_upper
    assert cdf(fam, u) == pytest.approx(v, rel=1e-10)


@pytest.mark.parametrize("beta", [0.3, 0.7, 1.0])
@pytest.mark.parametrize("s", [2.0, 10.0])
def test_rp_regular_variation_at_zero(beta, s):
    fam = rp(beta)
    errs = []
    for k in range(4, 11):
        u = 10.0**-k
        ratio = cdf(fam, s * u) / cdf(fam, u)
        exact = s**beta * (1 + u**beta) / (1 + (s * u) ** beta)
        assert ratio == pytest.approx(exact, rel=1e-12)
        errs.append(abs(ratio / s**beta - 1))
    # relative error is about u^beta (s^beta - 1)
    assert errs[-1] <= 1e-10**beta * s**beta * 1.01
    assert all(b <= a for a, b in zip(errs, errs[1:]))


@pytest.mark.parametrize("beta,gamma", [(1.0, -1.0), (0.7, -0.5), (0.5, 0.3), (1.0, -2.0)])
@pytest.mark.parametrize("s", [2.0, 10.0])
def test_lp_regular_variation_at_zero(beta, gamma, s):
    fam = lp(beta, gamma)
    errs = []
    for k in range(4, 11):
        u = 10.0**-k
        ratio = cdf(fam, s * u) / cdf(fam, u)
        exact = s**beta * ((1 - math.log(s * u)) / (1 - math.log(u))) ** gamma
        assert ratio == pytest.approx(exact, rel=1e-12)
        errs.append(abs(math.log(ratio) / math.log(s) - beta))
    # |log(1 - x)| <= x / (1 - x) with x = log s / (1 - log u)
    assert errs[-1] <= abs(gamma) / (1 - math.log(s * 1e-10)) * 1.01
    assert all(b <= a for a, b in zip(errs, errs[1:]))


SAMPLING_POINTS = [rp(1.0), rp(0.5), rp(0.3), lp(1.0, -1.0), lp(0.7, 0.2)]


@pytest.mark.parametrize("fam", SAMPLING_POINTS, ids=lambda f: f.spec)
def test_sample_matches_cdf(fam):
    n = 100_000
    w = sample_w(fam, n, seed=2024)
    d = kstest(w, lambda u: cdf(fam, np.maximum(u, 1e-300))).statistic
    assert d <= 1.36 / math.sqrt(n) * 1.5


def test_sample_rp1_ks_001():
    w = sample_w(rp(1.0), 100_000, seed=7)
    assert kstest(w, lambda u: cdf(rp(1.0), u)).statistic <= 0.01


def test_sample_support_and_determinism():
    fam = lp(1.0, -1.0)
    w = sample_w(fam, 10_000, seed=3)
    assert np.all((w > 0) & (w <= 1.0))
    assert np.array_equal(w, sample_w(fam, 10_000, seed=3))
    assert not np.array_equal(w, sample_w(fam, 10_000, seed=4))
    assert sample_w(fam, 0, seed=3).size == 0


@pytest.mark.parametrize(
    "kind,beta,gamma",
    [(RP, 0.0, 0.0), (RP, 1.5, 0.0), (RP, -0.1, 0.0), (RP, math.nan, 0.0), (RP, 0.5, 0.2), (LP, 1.0, 1.0), (LP, 0.5, 0.7), ("XX", 0.5, 0.0)],
)
def test_constructor_rejects(kind, beta, gamma):
    with pytest.raises(DomainError):
        MixingFamily(kind, beta, gamma)


def test_domain_errors():
    with pytest.raises(DomainError):
        cdf(rp(0.5), 0.0)
    with pytest.raises(DomainError):
        cdf(rp(0.5), -1.0)
    with pytest.raises(DomainError):
        cdf(rp(0.5), math.inf)
    with pytest.raises(DomainError):
        pdf(lp(1.0, -1.0), 0.0)
    for v in (0.0, 1.0, -0.2, 1.2):
        with pytest.raises(DomainError):
            quantile(lp(1.0, -1.0), v)


def test_parse_family_round_trip():
    for fam in (rp(0.7), rp(1.0), lp(1.0, -1.0), lp(0.25, -3.5)):
        assert parse_family(fam.spec) == fam
    assert parse_family("rp:beta=0.7") == rp(0.7)
    assert parse_family(" LP:beta=1, gamma=-1 ") == lp(1.0, -1.0)


@pytest.mark.parametrize(
    "text",
    ["rp", "rp:", "rp:beta=2", "rp:beta=0.5,gamma=0", "lp:beta=1", "lp:gamma=-1", "gamma:beta=1", "rp:beta=abc", "rp:beta=0.5,beta=0.6", "rp:alpha=1"],
)
def test_parse_family_rejects(text):
    with pytest.raises(DomainError):
        parse_family(text)


def test_point_mass():
    pm = PointMass(1.0)
    assert np.all(pm.sample(5, seed=1) == 1.0)
    with pytest.raises(DomainError):
        PointMass(0.0)
