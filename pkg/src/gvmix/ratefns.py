"""Rate functions of the MLE error.

* ``B(t) = 1 / H(1/t)`` where ``H`` is the quantile of ``W``.
* ``K(T) = int_0^T G(1/u) du``, the truncated mean of ``1/W``.
* ``A(t) = t * K(B(t))``.
* ``L(t) = K(t) / (t * G(1/t))``.

Closed forms are used where they exist (RP with beta = 1 for ``K``; every RP
for ``B``; LP with beta = 1 for ``K``). Everything else goes through quantile
inversion or quadrature. Pass ``method="numeric"`` to force the numerical
route even when a closed form is available; the test suite uses that to
cross-check the two.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize

from .errors import DomainError, NumericError
from .wfamily import LP, RP, MixingFamily

__all__ = [
    "T_MAX",
    "RateEvaluation",
    "EInvWVerdict",
    "rate_b",
    "karamata_k",
    "karamata_k_eval",
    "rate_a",
    "slow_variation_l",
    "rv_index_estimate",
    "condition_e_inv_w",
    "evaluate",
    "tabulate",
]

T_MAX = 1e15

_QUAD_EPSREL = 1e-12


def _check_t(t: float) -> float:
    t = float(t)
    if not math.isfinite(t) or t <= 1.0:
        raise DomainError(f"rate functions need t > 1, got {t}")
    if t > T_MAX:
        raise DomainError(f"t = {t:g} exceeds the supported range t <= {T_MAX:g}")
    return t


def _check_method(method: str) -> str:
    if method not in ("auto", "closed", "numeric"):
        raise DomainError(f"method must be 'auto', 'closed' or 'numeric', got {method!r}")
    return method


# ---------------------------------------------------------------------------
# B(t)


def _b_numeric(family: MixingFamily, t: float) -> float:
    # root of log G(e^s) = -log t, bracketed by doubling outward
    target = -math.log(t)

    def f(s):
        return math.log(family.cdf(math.exp(s))) - target

    lo, hi = -1.0, 1.0
    while f(lo) > 0.0:
        lo *= 2.0
        if lo < -1e4:
            raise NumericError("could not bracket G(u) = 1/t from below", residual=f(lo))
    upper = math.log(family.support_upper) if math.isfinite(family.support_upper) else None
    if upper is not None:
        hi = upper
    while f(hi) < 0.0:
        hi *= 2.0
        if hi > 1e4:
            raise NumericError("could not bracket G(u) = 1/t from above", residual=f(hi))
    s = optimize.brentq(f, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
    return math.exp(-s)


def rate_b(family: MixingFamily, t: float, method: str = "auto") -> float:
    """``B(t) = 1 / H(1/t)`` for ``t > 1``."""
    t = _check_t(t)
    method = _check_method(method)
    if method == "numeric":
        return _b_numeric(family, t)
    if family.kind == RP:
        return (t - 1.0) ** (1.0 / family.beta)
    if method == "closed":
        raise DomainError(f"no closed form for B with family {family.spec}")
    return 1.0 / family.quantile(1.0 / t)


# ---------------------------------------------------------------------------
# K(T)


def _k_closed(family: MixingFamily, T: float) -> float | None:
    if family.beta != 1.0:
        return None
    if family.kind == RP:
        return math.log1p(T)
    if T <= 1.0:
        return T
    g = family.gamma
    m = math.log1p(math.log(T))  # log(1 + log T)
    if g == -1.0:
        return 1.0 + m
    return 1.0 + math.expm1((1.0 + g) * m) / (1.0 + g)


def _quad(fun, a: float, b: float, what: str):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        value, err, info, *rest = integrate.quad(
            fun, a, b, epsabs=0.0, epsrel=_QUAD_EPSREL, limit=400, full_output=1
        )
    ier = rest[0] if rest else 0
    if ier not in (0,) and not err <= 1e-9 * abs(value):
        raise NumericError(f"quadrature for {what} did not converge", estimate=value, residual=err)
    return value, err


def _tail_integrand(family: MixingFamily):
    # G(1/u) du with u = e^v on [1, T]
    if family.kind == RP:
        b = family.beta
        return lambda v: math.exp(v) / (1.0 + math.exp(b * v))
    b, g = family.beta, family.gamma
    return lambda v: math.exp((1.0 - b) * v) * (1.0 + v) ** g


def _head_integrand(family: MixingFamily):
    # G(1/u) on (0, 1]
    if family.kind == RP:
        b = family.beta
        return lambda u: 1.0 / (1.0 + u**b)
    return lambda u: 1.0


def _k_between(family: MixingFamily, lo: float, hi: float):
    """``int_lo^hi G(1/u) du`` for ``0 <= lo <= hi``, split at ``u = 1``."""
    total, err = 0.0, 0.0
    if lo < 1.0:
        v, e = _quad(_head_integrand(family), lo, min(hi, 1.0), "K on (0, 1]")
        total, err = total + v, err + e
    if hi > 1.0:
        a = math.log(max(lo, 1.0))
        v, e = _quad(_tail_integrand(family), a, math.log(hi), "K on [1, T]")
        total, err = total + v, err + e
    return total, err


def karamata_k_eval(family: MixingFamily, T: float, method: str = "auto"):
    """``(K(T), abs_err_estimate, method_used)``."""
    T = float(T)
    if not math.isfinite(T) or T <= 0.0:
        raise DomainError(f"K(T) needs T > 0, got {T}")
    method = _check_method(method)
    if method != "numeric":
        closed = _k_closed(family, T)
        if closed is not None:
            return closed, 4.0 * np.finfo(float).eps * closed, "closed_form"
        if method == "closed":
            raise DomainError(f"no closed form for K with family {family.spec}")
    value, err = _k_between(family, 0.0, T)
    return value, err, "quadrature"


def karamata_k(family: MixingFamily, T: float, method: str = "auto") -> float:
    """``K(T) = int_0^T G(1/u) du``."""
    return karamata_k_eval(family, T, method)[0]


# ---------------------------------------------------------------------------
# A(t), L(t), index estimates


def rate_a(family: MixingFamily, t: float, method: str = "auto") -> float:
    """``A(t) = t * K(B(t))``; meaningful for beta = 1 families."""
    t = _check_t(t)
    if method != "numeric" and family.kind == RP and family.beta == 1.0:
        return t * math.log(t)
    return t * karamata_k(family, rate_b(family, t, method), method)


def slow_variation_l(family: MixingFamily, t: float, method: str = "auto") -> float:
    """``L(t) = K(t) / (t * G(1/t))``."""
    t = float(t)
    if not math.isfinite(t) or t <= 0.0:
        raise DomainError(f"L(t) needs t > 0, got {t}")
    g = family.cdf(1.0 / t)
    if g <= 0.0:
        raise DomainError(f"G(1/t) underflows at t = {t:g}")
    return karamata_k(family, t, method) / (t * g)


_RV_FUNCS = ("B", "A", "G")


def rv_index_estimate(f: str, family: MixingFamily, s: float, t: float, method: str = "auto") -> float:
    """``log(f(s t) / f(t)) / log s``, the regular-variation index at scale ``t``.

    ``f`` is ``"B"`` or ``"A"`` (index at infinity) or ``"G"`` (index of the
    CDF at zero; then ``t`` plays the role of a small ``u``).
    """
    f = f.upper()
    if f not in _RV_FUNCS:
        raise DomainError(f"f must be one of {_RV_FUNCS}, got {f!r}")
    s = float(s)
    if not s > 0.0 or s == 1.0:
        raise DomainError("scale s must be positive and different from 1")
    if f == "B":
        num, den = rate_b(family, s * t, method), rate_b(family, t, method)
    elif f == "A":
        num, den = rate_a(family, s * t, method), rate_a(family, t, method)
    else:
        num, den = family.cdf(s * t), family.cdf(t)
    return math.log(num / den) / math.log(s)


# ---------------------------------------------------------------------------
# E[1/W] finiteness


@dataclass
class EInvWVerdict:
    """Finiteness of ``E[1/W] = int_0^inf G(1/u) du``.

    ``T_grid``/``K_grid`` hold the quadrature evidence when the numerical rule
    was used, ``decay_exponent`` the fitted ``p`` in ``K(2T) - K(T) ~ (log T)**-p``.
    """

    verdict: str
    method: str
    reason: str
    T_grid: list = field(default_factory=list)
    K_grid: list = field(default_factory=list)
    decay_exponent: float | None = None

    @property
    def infinite(self) -> bool:
        return self.verdict == "infinite"


def _analytic_e_inv_w(family: MixingFamily) -> EInvWVerdict | None:
    if family.kind == RP:
        return EInvWVerdict("infinite", "analytic", "RP: G(1/u) ~ u**-beta with beta <= 1")
    if family.kind == LP:
        if family.beta < 1.0:
            return EInvWVerdict("infinite", "analytic", "LP, beta < 1: G(1/u) decays slower than 1/u")
        # K(T) = 1 + int_0^{log T} (1 + v)**gamma dv, unbounded iff gamma >= -1
        if family.gamma >= -1.0:
            return EInvWVerdict("infinite", "analytic", "LP, beta = 1: (1 + log T)**(1 + gamma) unbounded for gamma >= -1")
        return EInvWVerdict("finite", "analytic", "LP, beta = 1: K(T) -> 1 - 1/(1 + gamma) for gamma < -1")
    return None


def _numeric_e_inv_w(family: MixingFamily, t0: float = 2.0**10, doublings: int = 40, tail: int = 16) -> EInvWVerdict:
    # Increments over doubling intervals, integrated directly to avoid cancellation.
    # Divergent integrals in this setting grow at least like a power of log T, so the
    # increments decay no faster than (log T)**-1; summable ones decay like (log T)**-p, p > 1.
    T = [t0 * 2.0**k for k in range(doublings + 1)]
    k0, _ = _k_between(family, 0.0, T[0])
    incr = [_k_between(family, a, b)[0] for a, b in zip(T[:-1], T[1:])]
    K = list(np.cumsum([k0] + incr))
    d = np.asarray(incr[-tail:])
    logT = np.log(np.asarray(T[-tail - 1 : -1]))
    if np.any(d <= 0.0):
        return EInvWVerdict("inconclusive", "numeric", "nonpositive increment", T, K)
    ratios = d[1:] / d[:-1]
    if np.all(ratios <= 0.9):
        return EInvWVerdict("finite", "numeric", "increments decay geometrically", T, K)
    slope = np.polyfit(np.log(logT), np.log(d), 1)[0]
    p = float(-slope)
    if p <= 1.1:
        return EInvWVerdict("infinite", "numeric", f"increment decay exponent {p:.3f} <= 1.1, not summable", T, K, p)
    if p >= 1.5:
        return EInvWVerdict("finite", "numeric", f"increment decay exponent {p:.3f} >= 1.5, summable", T, K, p)
    return EInvWVerdict("inconclusive", "numeric", f"decay exponent {p:.3f} too close to 1 to call", T, K, p)


def condition_e_inv_w(family: MixingFamily, method: str = "auto") -> EInvWVerdict:
    """Decide whether ``E[1/W]`` is finite.

    ``auto`` applies the analytic rule for the built-in families; ``numeric``
    always runs the quadrature heuristic, which may answer ``"inconclusive"``.
    """
    method = _check_method(method)
    if method != "numeric":
        verdict = _analytic_e_inv_w(family)
        if verdict is not None:
            return verdict
    return _numeric_e_inv_w(family)


# ---------------------------------------------------------------------------
# bundled evaluation


@dataclass(frozen=True)
class RateEvaluation:
    t: float
    b_of_t: float
    a_of_t: float | None
    k_of_bt: float | None
    method: str
    abs_err_estimate: float

    @property
    def a_over_b(self) -> float | None:
        return None if self.a_of_t is None else self.a_of_t / self.b_of_t


def evaluate(family: MixingFamily, t: float, method: str = "auto", with_a: bool | None = None) -> RateEvaluation:
    """``B(t)`` and, for beta = 1 families by default, ``K(B(t))`` and ``A(t)``."""
    t = _check_t(t)
    if with_a is None:
        with_a = family.beta == 1.0
    b = rate_b(family, t, method)
    if not with_a:
        used = "closed_form" if family.kind == RP and method != "numeric" else "quadrature"
        return RateEvaluation(t, b, None, None, used, 0.0)
    k, err, used = karamata_k_eval(family, b, method)
    return RateEvaluation(t, b, t * k, k, used, t * err)


def tabulate(family: MixingFamily, t_values, method: str = "auto") -> list[dict]:
    """Rows of ``t, B, A, A/B, L(B(t))`` for the ``rates`` CLI."""
    rows = []
    for t in t_values:
        ev = evaluate(family, t, method, with_a=True)
        rows.append(
            {
                "t": ev.t,
                "B": ev.b_of_t,
                "A": ev.a_of_t,
                "A_over_B": ev.a_over_b,
                "L_of_B": slow_variation_l(family, ev.b_of_t, method),
                "method": ev.method,
            }
        )
    return rows
