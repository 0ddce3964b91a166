"""Pure-Python reference kernels.

Same call signatures as the compiled ``_ckernels`` module. Inputs are assumed
validated by the public wrappers in :mod:`isac_tradeoff.specfun` and
:mod:`isac_tradeoff.montecarlo`.
"""
import math

import numpy as np

EULER_GAMMA = 0.57721566490153286061
# E1 switches from the power series to the continued fraction above this point
E1_SWITCH = 1.0
# I0 switches from the power series to the large-argument expansion above this
I0_SWITCH = 30.0
_EPS = 1e-17
_MAX_TERMS = 100000
_TINY = 1e-300


def _e1_series(x):
    # E1(x) = -gamma - ln x - sum_{k>=1} (-x)^k / (k k!)
    total = 0.0
    term = 1.0
    k = 1
    while k < _MAX_TERMS:
        term *= -x / k
        piece = term / k
        total += piece
        if abs(piece) < _EPS * abs(total):
            break
        k += 1
    return -EULER_GAMMA - math.log(x) - total


def _e1_scaled_cf(x):
    # modified Lentz on the even form of the continued fraction for e^x E1(x)
    b = x + 1.0
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    i = 1
    while i < _MAX_TERMS:
        an = -float(i * i)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
        i += 1
    return h


def e1(x):
    """E1(x) for x > 0."""
    if x <= E1_SWITCH:
        return _e1_series(x)
    return _e1_scaled_cf(x) * math.exp(-x)


def e1_scaled(x):
    """exp(x) * E1(x) for x > 0, without overflow for large x."""
    if x <= E1_SWITCH:
        return math.exp(x) * _e1_series(x)
    return _e1_scaled_cf(x)


def i0(x):
    """Modified Bessel I0 for x >= 0; returns inf past the overflow point."""
    if x <= I0_SWITCH:
        q = 0.25 * x * x
        total = 1.0
        term = 1.0
        k = 1
        while k < _MAX_TERMS:
            term *= q / (k * k)
            total += term
            if term < _EPS * total:
                break
            k += 1
        return total
    # e^x / sqrt(2 pi x) * sum_k ((2k-1)!!)^2 / (k! (8x)^k)
    total = 1.0
    term = 1.0
    k = 1
    while k < 200:
        nxt = term * (2 * k - 1) ** 2 / (8.0 * k * x)
        if nxt > term:
            break
        term = nxt
        total += term
        if term < _EPS * total:
            break
        k += 1
    log_scale = x - 0.5 * math.log(2.0 * math.pi * x)
    if log_scale > 709.0:
        return math.exp(log_scale - 709.0) * total * math.exp(709.0)
    return math.exp(log_scale) * total


def hyp1f1_half(x):
    """Kummer series for 1F1(1/2; 1; x), x >= 0."""
    total = 1.0
    term = 1.0
    k = 0
    while k < _MAX_TERMS:
        term *= (k + 0.5) * x / ((k + 1.0) * (k + 1.0))
        total += term
        if term < 1e-16 * total or math.isinf(total):
            break
        k += 1
    return total


def capacity_sums(h_pow, w_pow, gamma_d):
    """Sum and sum of squares of log2(1 + h g / (1 + w g))."""
    vals = np.log2(1.0 + h_pow * gamma_d / (1.0 + w_pow * gamma_d))
    return float(np.sum(vals)), float(np.sum(vals * vals))


def inverse_sums(x):
    """Sum and sum of squares of 1/x."""
    inv = 1.0 / x
    return float(np.sum(inv)), float(np.sum(inv * inv))
