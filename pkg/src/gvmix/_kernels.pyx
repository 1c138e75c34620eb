# cython: language_level=3
"""Compiled inner loops.

Same contract as ``gvmix._fallback``; selected by ``gvmix._backend``.
Uniform and normal variates are always produced by NumPy so both backends
consume identical random streams.
"""
import numpy as np

from libc.math cimport INFINITY, exp, fabs, log, log1p, pow, sqrt

cdef int MAX_ITER = 200

cdef enum:
    KIND_RP = 0
    KIND_LP = 1
    KIND_POINT = 2


cdef inline double _lp_solve(double c, double beta, double gamma) noexcept nogil:
    # root in y >= 0 of beta*y - gamma*log1p(y) = c, c > 0
    cdef double lo, hi, y, f, fp, step, y_new
    cdef int it
    if beta - gamma < beta:
        lo = c / beta
        hi = c / (beta - gamma)
    else:
        lo = c / (beta - gamma)
        hi = c / beta
    y = (c + gamma * log1p(c / beta)) / beta
    if y < lo or y > hi:
        y = 0.5 * (lo + hi)
    for it in range(MAX_ITER):
        f = beta * y - gamma * log1p(y) - c
        if f > 0.0:
            hi = y
        elif f < 0.0:
            lo = y
        else:
            return y
        fp = beta - gamma / (1.0 + y)
        step = f / fp
        y_new = y - step
        if y_new <= lo or y_new >= hi:
            y = 0.5 * (lo + hi)
            if hi - lo <= 4e-16 * y:
                break
            continue
        y = y_new
        # Newton is quadratic here: the error after this step is O(step**2)
        if fabs(step) <= 1e-9 * y:
            break
    return y


def lp_neglog_quantile(const double[::1] v, double beta, double gamma):
    """Return ``-log H(v)`` elementwise for the log-power family."""
    cdef Py_ssize_t i, n = v.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] y = out
    with nogil:
        for i in range(n):
            y[i] = _lp_solve(-log(v[i]), beta, gamma)
    return out


def neumaier_sum(const double[::1] a):
    """Compensated (Neumaier) sum of a contiguous float64 array."""
    cdef Py_ssize_t i, n = a.shape[0]
    cdef double s = 0.0, c = 0.0, t, x
    with nogil:
        for i in range(n):
            x = a[i]
            t = s + x
            if fabs(s) >= fabs(x):
                c += (s - t) + x
            else:
                c += (x - t) + s
            s = t
    return s + c


def replicate(int kind, double beta, double gamma, double mu,
              const double[::1] u, const double[::1] z):
    """Draw one sample and return ``(mu_hat, s_n)``.

    ``u`` are uniforms on the open unit interval mapped through the mixing
    quantile; ``z`` are standard normals. Both sums are compensated and the
    weighted mean is clipped to ``[min x, max x]``.
    """
    cdef Py_ssize_t i, n = u.shape[0]
    cdef double w, x, a, t, mu_hat
    cdef double s1 = 0.0, c1 = 0.0, s2 = 0.0, c2 = 0.0
    cdef double xmin = INFINITY, xmax = -INFINITY
    if n == 0:
        raise ValueError("empty sample")
    cdef double inv_beta = 1.0 / beta
    if z.shape[0] != n:
        raise ValueError("u and z must have equal length")
    if kind not in (KIND_RP, KIND_LP, KIND_POINT):
        raise ValueError(f"unknown family kind {kind}")
    with nogil:
        for i in range(n):
            if kind == KIND_RP:
                w = pow(u[i] / (1.0 - u[i]), inv_beta)
            elif kind == KIND_LP:
                w = exp(-_lp_solve(-log(u[i]), beta, gamma))
            else:
                w = 1.0
            x = mu + sqrt(w) * z[i]
            if x < xmin:
                xmin = x
            if x > xmax:
                xmax = x

            a = 1.0 / w
            t = s1 + a
            if fabs(s1) >= fabs(a):
                c1 += (s1 - t) + a
            else:
                c1 += (a - t) + s1
            s1 = t

            a = x / w
            t = s2 + a
            if fabs(s2) >= fabs(a):
                c2 += (s2 - t) + a
            else:
                c2 += (a - t) + s2
            s2 = t
    s1 += c1
    mu_hat = (s2 + c2) / s1
    if mu_hat < xmin:
        mu_hat = xmin
    elif mu_hat > xmax:
        mu_hat = xmax
    return mu_hat, s1
