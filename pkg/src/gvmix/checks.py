"""Fast invariant suite behind ``gvmix check``.

Each check returns a :class:`CheckResult`; none raises on failure. Library
functions are looked up through their modules at call time so a patched
implementation is what gets checked.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np
from scipy import special

from . import estimator, experiment, mixture, ratefns, stablelim
from .wfamily import lp, rp


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail} ({self.seconds:.2f}s)"


def check_quantile_roundtrip() -> tuple[bool, str]:
    v = np.linspace(0.001, 0.999, 199)
    worst = 0.0
    for beta in (0.3, 0.5, 0.7, 1.0):
        fams = [rp(beta)] + [lp(beta, g) for g in (-1.0, -0.5, 0.0, 0.5) if g < beta]
        for fam in fams:
            err = np.max(np.abs(fam.cdf(fam.quantile(v)) - v) / v)
            worst = max(worst, float(err))
    return worst <= 1e-10, f"max relative |G(H(v)) - v| = {worst:.2e}"


def check_score_identity(seed: int = 1) -> tuple[bool, str]:
    worst = 0.0
    for k, fam in enumerate((rp(0.5), rp(1.0), lp(1.0, -1.0))):
        s = mixture.sample_pairs(fam, 200, mu=0.3, seed=[seed, k])
        mu_hat = estimator.mle(s).mu_hat
        terms = mixture.score(s.x, s.w, mu_hat)
        worst = max(worst, abs(math.fsum(terms)) / math.fsum(np.abs(terms)))
    return worst <= 1e-9, f"|sum score(mu_hat)| / sum |score| = {worst:.2e}"


def check_score_gradient(seed: int = 2) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    fam = rp(0.7)
    worst = 0.0
    for k in range(20):
        s = mixture.sample_pairs(fam, 20, mu=0.0, seed=[seed, k])
        mu = float(rng.normal())
        h = 1e-6 * max(1.0, abs(mu))
        fd = (mixture.log_likelihood(fam, s, mu + h) - mixture.log_likelihood(fam, s, mu - h)) / (2 * h)
        analytic = math.fsum(mixture.score(s.x, s.w, mu))
        worst = max(worst, abs(fd - analytic) / max(1.0, abs(analytic)))
    return worst <= 1e-5, f"max relative gap to central differences = {worst:.2e}"


def check_conditional_normality(seed: int = 3, n: int = 3, reps: int = 2000) -> tuple[bool, str]:
    fam = rp(0.5)
    z = np.array(
        [estimator.conditional_standardize(mixture.sample_pairs(fam, n, 0.0, seed=[seed, r]), 0.0) for r in range(reps)]
    )
    d = experiment.ks_one_sample(z, special.ndtr)
    crit = 1.63 / math.sqrt(reps)
    return d <= crit, f"KS = {d:.4f} vs critical {crit:.4f} (n={n}, R={reps})"


def check_laplace(seed: int = 4, n: int = 100_000) -> tuple[bool, str]:
    worst = 0.0
    for beta in (0.3, 0.5, 0.7):
        u = stablelim.sample_subordinator(beta, n, seed=[seed, int(beta * 10)]).draws
        e = np.exp(-u)
        se = e.std(ddof=1) / math.sqrt(n)
        worst = max(worst, abs(e.mean() - float(stablelim.laplace_transform(beta, 1.0))) / se)
    return worst <= 3.0, f"max |mean exp(-U) - transform| = {worst:.2f} standard errors"


def check_rate_closed_forms() -> tuple[bool, str]:
    worst = 0.0
    for t in (10.0, 1e3, 1e6):
        for beta in (0.3, 0.5, 1.0):
            c, q = ratefns.rate_b(rp(beta), t), ratefns.rate_b(rp(beta), t, "numeric")
            worst = max(worst, abs(c - q) / c)
        c, q = ratefns.rate_a(rp(1.0), t), ratefns.rate_a(rp(1.0), t, "numeric")
        worst = max(worst, abs(c - q) / c)
        for g in (-1.0, -0.5):
            c, q = ratefns.karamata_k(lp(1.0, g), t), ratefns.karamata_k(lp(1.0, g), t, "numeric")
            worst = max(worst, abs(c - q) / c)
    return worst <= 1e-7, f"max relative closed-form vs numeric gap = {worst:.2e}"


def check_a_over_b_identity() -> tuple[bool, str]:
    worst = 0.0
    for fam in (rp(1.0), lp(1.0, -1.0), lp(1.0, -0.5)):
        for t in (1e2, 1e4, 1e6, 1e8):
            b = ratefns.rate_b(fam, t)
            lhs = ratefns.rate_a(fam, t) / b
            rhs = ratefns.slow_variation_l(fam, b)
            worst = max(worst, abs(lhs - rhs) / rhs)
    return worst <= 1e-8, f"max relative |A/B - L(B)| = {worst:.2e}"


CHECKS = {
    "quantile round-trip": check_quantile_roundtrip,
    "score identity at the MLE": check_score_identity,
    "score vs finite differences": check_score_gradient,
    "exact conditional normality (n=3)": check_conditional_normality,
    "subordinator Laplace transform": check_laplace,
    "rate closed forms vs numerics": check_rate_closed_forms,
    "A(t)/B(t) = L(B(t))": check_a_over_b_identity,
}


def run_checks() -> list[CheckResult]:
    results = []
    for name, fn in CHECKS.items():
        t0 = time.perf_counter()
        try:
            passed, detail = fn()
        except Exception as exc:  # noqa: BLE001 - a crashing check is a failed check
            passed, detail = False, f"raised {type(exc).__name__}: {exc}"
        results.append(CheckResult(name, bool(passed), detail, time.perf_counter() - t0))
    return results
