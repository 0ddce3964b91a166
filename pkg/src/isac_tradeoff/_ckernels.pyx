# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; mirrors ``_pykernels`` call for call.

Do not build with -ffast-math: the compensated sums and the inf checks rely
on strict IEEE semantics.
"""
from libc.math cimport exp, fabs, isinf, log, M_LN2, M_PI

cdef double EULER_GAMMA = 0.57721566490153286061
cdef double E1_SWITCH = 1.0
cdef double I0_SWITCH = 30.0
cdef double _EPS = 1e-17
cdef long _MAX_TERMS = 100000
cdef double _TINY = 1e-300


cdef double _e1_series(double x) nogil:
    cdef double total = 0.0, term = 1.0, piece
    cdef long k = 1
    while k < _MAX_TERMS:
        term *= -x / k
        piece = term / k
        total += piece
        if fabs(piece) < _EPS * fabs(total):
            break
        k += 1
    return -EULER_GAMMA - log(x) - total


cdef double _e1_scaled_cf(double x) nogil:
    cdef double b = x + 1.0
    cdef double c = 1.0 / _TINY
    cdef double d = 1.0 / b
    cdef double h = d
    cdef double an, delta
    cdef long i = 1
    while i < _MAX_TERMS:
        an = -<double>(i * i)
        b += 2.0
        d = an * d + b
        if fabs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if fabs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = c * d
        h *= delta
        if fabs(delta - 1.0) < 1e-16:
            break
        i += 1
    return h


cpdef double e1(double x):
    if x <= E1_SWITCH:
        return _e1_series(x)
    return _e1_scaled_cf(x) * exp(-x)


cpdef double e1_scaled(double x):
    if x <= E1_SWITCH:
        return exp(x) * _e1_series(x)
    return _e1_scaled_cf(x)


cpdef double i0(double x):
    cdef double q, total = 1.0, term = 1.0, nxt, log_scale
    cdef long k = 1
    if x <= I0_SWITCH:
        q = 0.25 * x * x
        while k < _MAX_TERMS:
            term *= q / (<double>k * k)
            total += term
            if term < _EPS * total:
                break
            k += 1
        return total
    while k < 200:
        nxt = term * (2 * k - 1) * (2 * k - 1) / (8.0 * k * x)
        if nxt > term:
            break
        term = nxt
        total += term
        if term < _EPS * total:
            break
        k += 1
    log_scale = x - 0.5 * log(2.0 * M_PI * x)
    if log_scale > 709.0:
        return exp(log_scale - 709.0) * total * exp(709.0)
    return exp(log_scale) * total


cpdef double hyp1f1_half(double x):
    cdef double total = 1.0, term = 1.0
    cdef long k = 0
    while k < _MAX_TERMS:
        term *= (k + 0.5) * x / ((k + 1.0) * (k + 1.0))
        total += term
        if term < 1e-16 * total or isinf(total):
            break
        k += 1
    return total


def capacity_sums(const double[::1] h_pow, const double[::1] w_pow, double gamma_d):
    """Neumaier-compensated sum and sum of squares of log2(1 + h g / (1 + w g))."""
    cdef Py_ssize_t i, n = h_pow.shape[0]
    cdef double v, s = 0.0, cs = 0.0, q = 0.0, cq = 0.0, t, v2
    with nogil:
        for i in range(n):
            # natural log is markedly faster than log2 in glibc; rescaled below
            v = log(1.0 + h_pow[i] * gamma_d / (1.0 + w_pow[i] * gamma_d))
            t = s + v
            if fabs(s) >= fabs(v):
                cs += (s - t) + v
            else:
                cs += (v - t) + s
            s = t
            v2 = v * v
            t = q + v2
            if fabs(q) >= fabs(v2):
                cq += (q - t) + v2
            else:
                cq += (v2 - t) + q
            q = t
    return (s + cs) / M_LN2, (q + cq) / (M_LN2 * M_LN2)


def inverse_sums(const double[::1] x):
    """Neumaier-compensated sum and sum of squares of 1/x."""
    cdef Py_ssize_t i, n = x.shape[0]
    cdef double v, s = 0.0, cs = 0.0, q = 0.0, cq = 0.0, t, v2
    with nogil:
        for i in range(n):
            v = 1.0 / x[i]
            t = s + v
            if fabs(s) >= fabs(v):
                cs += (s - t) + v
            else:
                cs += (v - t) + s
            s = t
            v2 = v * v
            t = q + v2
            if fabs(q) >= fabs(v2):
                cq += (q - t) + v2
            else:
                cq += (v2 - t) + q
            q = t
    return s + cs, q + cq
