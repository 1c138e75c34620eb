"""Mixing distributions for the variance ``W``.

Two families have a CDF ``G`` that is regularly varying at zero:

``RP`` (rational power)
    ``G(u) = u**beta / (1 + u**beta)`` on ``(0, inf)``. Everything is closed
    form, which makes it the analytic anchor for the rate functions.
``LP`` (log power)
    ``G(u) = u**beta * (1 - log u)**gamma`` on ``(0, 1]`` and ``G = 1`` above.
    The extra logarithmic factor produces the log-corrected rates.

Both behave like ``const * u**beta * |log u|**gamma`` as ``u -> 0``.

Family specification strings (used by the CLI and experiment configs)::

    rp:beta=0.7
    lp:beta=1,gamma=-1
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import DomainError, NumericError

__all__ = [
    "MixingFamily",
    "PointMass",
    "rp",
    "lp",
    "parse_family",
    "cdf",
    "pdf",
    "quantile",
    "sample_w",
    "open_uniform",
]

RP = "RP"
LP = "LP"


def _scalar_or_array(values, scalar):
    return float(values) if scalar else values


def _as_positive(u, name="u"):
    arr = np.asarray(u, dtype=np.float64)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
        raise DomainError(f"{name} must be positive and finite")
    return arr


def open_uniform(rng: np.random.Generator, n: int) -> np.ndarray:
    """``n`` uniforms on the open interval ``(0, 1)``."""
    u = rng.random(n)
    u[u == 0.0] = 2.0**-54
    return u


@dataclass(frozen=True)
class MixingFamily:
    """Distribution ``Q`` of the mixing variance ``W``.

    Use :func:`rp`, :func:`lp` or :func:`parse_family` rather than the
    constructor directly; ``__post_init__`` enforces the parameter bounds
    either way.
    """

    kind: str
    beta: float
    gamma: float = 0.0

    def __post_init__(self):
        if self.kind not in (RP, LP):
            raise DomainError(f"unknown family kind {self.kind!r}; expected 'RP' or 'LP'")
        beta = float(self.beta)
        gamma = float(self.gamma)
        if not math.isfinite(beta) or not 0.0 < beta <= 1.0:
            raise DomainError(f"beta must lie in (0, 1], got {self.beta!r}")
        if not math.isfinite(gamma):
            raise DomainError(f"gamma must be finite, got {self.gamma!r}")
        if self.kind == RP and gamma != 0.0:
            raise DomainError("the RP family has gamma = 0")
        if self.kind == LP and not gamma < beta:
            # G' > 0 on (0, 1] needs beta*(1 - log u) > gamma
            raise DomainError(f"LP family requires gamma < beta, got gamma={gamma} beta={beta}")
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "gamma", gamma)

    @property
    def spec(self) -> str:
        if self.kind == RP:
            return f"rp:beta={self.beta!r}"
        return f"lp:beta={self.beta!r},gamma={self.gamma!r}"

    @property
    def support_upper(self) -> float:
        return math.inf if self.kind == RP else 1.0

    @property
    def kernel_code(self) -> int:
        return _backend.KIND_RP if self.kind == RP else _backend.KIND_LP

    def cdf(self, u):
        """``G(u) = P(W <= u)`` for ``u > 0``."""
        scalar = np.ndim(u) == 0
        u = _as_positive(u)
        b = self.beta
        if self.kind == RP:
            with np.errstate(over="ignore"):
                out = 1.0 / (1.0 + np.power(u, -b))
        else:
            inside = np.minimum(u, 1.0)
            out = np.power(inside, b) * np.power(1.0 - np.log(inside), self.gamma)
            out = np.where(u >= 1.0, 1.0, out)
        return _scalar_or_array(out, scalar)

    def pdf(self, u):
        """Density ``g_W(u)``; zero above the LP support."""
        scalar = np.ndim(u) == 0
        u = _as_positive(u)
        b, g = self.beta, self.gamma
        if self.kind == RP:
            with np.errstate(over="ignore", invalid="ignore"):
                ub = np.power(u, b)
                out = b * ub / (u * (1.0 + ub) ** 2)
            out = np.where(np.isfinite(ub), out, 0.0)
        else:
            inside = np.minimum(u, 1.0)
            m = 1.0 - np.log(inside)
            out = np.power(inside, b - 1.0) * np.power(m, g - 1.0) * (b * m - g)
            out = np.where(u > 1.0, 0.0, out)
        return _scalar_or_array(out, scalar)

    def log_pdf(self, u):
        """``log g_W(u)``, ``-inf`` outside the support."""
        scalar = np.ndim(u) == 0
        u = _as_positive(u)
        b, g = self.beta, self.gamma
        if self.kind == RP:
            lu = np.log(u)
            # log(1 + u**b) without overflow
            out = math.log(b) + (b - 1.0) * lu - 2.0 * np.logaddexp(0.0, b * lu)
        else:
            inside = np.minimum(u, 1.0)
            lu = np.log(inside)
            m = 1.0 - lu
            out = (b - 1.0) * lu + (g - 1.0) * np.log(m) + np.log(b * m - g)
            out = np.where(u > 1.0, -np.inf, out)
        return _scalar_or_array(out, scalar)

    def quantile(self, v):
        """Inverse CDF ``H(v)`` for ``0 < v < 1``."""
        scalar = np.ndim(v) == 0
        v = np.asarray(v, dtype=np.float64)
        if not np.all((v > 0.0) & (v < 1.0)):
            raise DomainError("quantile level must lie in the open interval (0, 1)")
        if self.kind == RP:
            out = np.power(v / (1.0 - v), 1.0 / self.beta)
        else:
            y = _backend.lp_neglog_quantile(np.ascontiguousarray(v.ravel()), self.beta, self.gamma)
            y = np.asarray(y).reshape(v.shape)
            residual = np.abs(self.beta * y - self.gamma * np.log1p(y) + np.log(v))
            worst = float(residual.max()) if residual.size else 0.0
            if not worst <= 1e-12 * max(1.0, float(np.max(-np.log(v), initial=0.0))):
                raise NumericError("LP quantile inversion did not converge", np.exp(-y), worst)
            out = np.exp(-y)
        return _scalar_or_array(out, scalar)

    def sample(self, n: int, seed=None) -> np.ndarray:
        """``n`` IID draws by inverse transform, reproducible given ``seed``."""
        if n < 0:
            raise DomainError("n must be nonnegative")
        rng = np.random.default_rng(seed)
        if n == 0:
            return np.empty(0)
        return self.quantile(open_uniform(rng, n))


@dataclass(frozen=True)
class PointMass:
    """Degenerate mixing law ``W = value``: the classical root-n control.

    Not parseable from a spec string; exists so experiments can run the
    standard-rate baseline through the same pipeline.
    """

    value: float = 1.0

    kind = "POINT"
    beta = None
    gamma = None

    def __post_init__(self):
        if not (math.isfinite(self.value) and self.value > 0.0):
            raise DomainError("point mass location must be positive")

    @property
    def spec(self) -> str:
        return f"point:w={self.value!r}"

    @property
    def kernel_code(self) -> int:
        return _backend.KIND_POINT

    @property
    def support_upper(self) -> float:
        return self.value

    def sample(self, n: int, seed=None) -> np.ndarray:
        if n < 0:
            raise DomainError("n must be nonnegative")
        rng = np.random.default_rng(seed)
        open_uniform(rng, n)  # keep stream layout aligned with the other families
        return np.full(n, float(self.value))

    def quantile(self, v):
        scalar = np.ndim(v) == 0
        out = np.full(np.shape(v), float(self.value))
        return _scalar_or_array(out, scalar)

    def log_pdf(self, u):
        raise DomainError("a point mass has no Lebesgue density")


def rp(beta: float) -> MixingFamily:
    return MixingFamily(RP, beta, 0.0)


def lp(beta: float, gamma: float) -> MixingFamily:
    return MixingFamily(LP, beta, gamma)


def parse_family(text: str) -> MixingFamily:
    """Parse ``"rp:beta=<f>"`` or ``"lp:beta=<f>,gamma=<f>"``."""
    head, sep, rest = text.strip().partition(":")
    kind = head.strip().upper()
    if not sep or kind not in (RP, LP):
        raise DomainError(f"bad family spec {text!r}; expected 'rp:beta=..' or 'lp:beta=..,gamma=..'")
    params = {}
    for item in filter(None, (p.strip() for p in rest.split(","))):
        key, eq, value = item.partition("=")
        key = key.strip().lower()
        if not eq or key not in ("beta", "gamma") or key in params:
            raise DomainError(f"bad family parameter {item!r} in {text!r}")
        try:
            params[key] = float(value)
        except ValueError:
            raise DomainError(f"parameter {key} is not a number: {value!r}") from None
    if "beta" not in params:
        raise DomainError(f"family spec {text!r} is missing beta")
    if kind == RP:
        if "gamma" in params:
            raise DomainError("the RP family takes no gamma")
        return rp(params["beta"])
    if "gamma" not in params:
        raise DomainError(f"family spec {text!r} is missing gamma")
    return lp(params["beta"], params["gamma"])


def cdf(family: MixingFamily, u):
    return family.cdf(u)


def pdf(family: MixingFamily, u):
    return family.pdf(u)


def quantile(family: MixingFamily, v):
    return family.quantile(v)


def sample_w(family: MixingFamily, n: int, seed=None) -> np.ndarray:
    return family.sample(n, seed)
