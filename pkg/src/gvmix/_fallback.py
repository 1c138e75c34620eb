"""Pure NumPy implementation of the inner loops in ``_kernels.pyx``."""
from __future__ import annotations

import math

import numpy as np

KIND_RP = 0
KIND_LP = 1
KIND_POINT = 2

_MAX_ITER = 200


def lp_neglog_quantile(v, beta: float, gamma: float) -> np.ndarray:
    """Return ``-log H(v)`` elementwise for the log-power family.

    Solves ``beta*y - gamma*log1p(y) = -log(v)`` by Newton's method kept
    inside a bracket that is valid for every ``gamma < beta``.
    """
    v = np.asarray(v, dtype=np.float64)
    shape = v.shape
    c = -np.log(v.ravel())
    if gamma <= 0.0:
        lo, hi = c / (beta - gamma), c / beta
    else:
        lo, hi = c / beta, c / (beta - gamma)
    lo = np.array(lo, dtype=np.float64, copy=True)
    hi = np.array(hi, dtype=np.float64, copy=True)
    y = (c + gamma * np.log1p(c / beta)) / beta
    outside = (y < lo) | (y > hi)
    y[outside] = 0.5 * (lo[outside] + hi[outside])
    active = np.ones(y.shape, dtype=bool)
    for _ in range(_MAX_ITER):
        if not active.any():
            break
        ya = y[active]
        f = beta * ya - gamma * np.log1p(ya) - c[active]
        lo_a, hi_a = lo[active], hi[active]
        lo_a = np.where(f < 0.0, ya, lo_a)
        hi_a = np.where(f > 0.0, ya, hi_a)
        step = f / (beta - gamma / (1.0 + ya))
        y_new = ya - step
        bad = (y_new <= lo_a) | (y_new >= hi_a)
        y_new = np.where(bad, 0.5 * (lo_a + hi_a), y_new)
        y_new = np.where(f == 0.0, ya, y_new)
        # Newton steps converge quadratically; bisection steps only by the bracket
        done = (
            (f == 0.0)
            | (~bad & (np.abs(step) <= 1e-9 * y_new))
            | (bad & (hi_a - lo_a <= 4e-16 * y_new))
        )
        lo[active], hi[active], y[active] = lo_a, hi_a, y_new
        idx = np.flatnonzero(active)
        active[idx[done]] = False
    return y.reshape(shape)


def neumaier_sum(a) -> float:
    """Correctly rounded sum (stronger than the compiled Neumaier loop)."""
    return math.fsum(np.asarray(a, dtype=np.float64))


def replicate(kind: int, beta: float, gamma: float, mu: float, u, z):
    """Draw one sample and return ``(mu_hat, s_n)``; see ``_kernels.replicate``."""
    u = np.asarray(u, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    if u.shape != z.shape:
        raise ValueError("u and z must have equal length")
    if kind == KIND_RP:
        w = np.power(u / (1.0 - u), 1.0 / beta)
    elif kind == KIND_LP:
        w = np.exp(-lp_neglog_quantile(u, beta, gamma))
    elif kind == KIND_POINT:
        w = np.ones_like(u)
    else:
        raise ValueError(f"unknown family kind {kind}")
    if u.size == 0:
        raise ValueError("empty sample")
    x = mu + np.sqrt(w) * z
    s_n = math.fsum(1.0 / w)
    mu_hat = min(max(math.fsum(x / w) / s_n, float(x.min())), float(x.max()))
    return mu_hat, s_n
