"""Ergodic capacity of the data phase under imperfect channel estimation.

All routines work in noise-normalised units (data noise variance 1, data
power gamma_d), which leaves the capacity unchanged. Capacity is returned in
bandwidth x symbols x bits, i.e. B (L - L_p) times the expected log2 term.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .channel import CommLink, SlotConfig, data_error
from .errors import DegenerateInputError
from .specfun import QuadSpec, exp_ei, integrate_semi_infinite

CapacityForm = Literal["canonical", "as_printed"]

# below this |1 - e_d / sigma1^2| the bracket difference is expanded in a series
SERIES_SWITCH = 1e-6
SINGULAR_GUARD = 1e-12


@dataclass(frozen=True)
class CapacityResult:
    capacity: float
    e_d_used: float
    form: Literal["closed", "integral"]

    def per_slot(self, slot: SlotConfig) -> float:
        """Capacity normalised by B * L (bits per symbol, averaged over the slot)."""
        return self.capacity / (slot.B * slot.L)


def _prefactor(L, L_p, B):
    return B * (L - L_p) / math.log(2.0)


def capacity_from_error(r: float, sigma1_sq: float, gamma_d: float, e_d: float) -> float:
    """Closed-form capacity for a given estimation error ``e_d``.

    ``r`` is the B (L - L_p) / ln 2 prefactor. Raises DegenerateInputError
    when e_d is within 1e-12 (relative) of sigma1_sq, where the closed form
    is 0/0.
    """
    if not 0.0 <= e_d <= sigma1_sq:
        raise DegenerateInputError(f"e_d must lie in [0, sigma1_sq], got {e_d}")
    a = 1.0 / (gamma_d * sigma1_sq)
    ga = exp_ei(a)
    if e_d == 0.0:
        # perfect CSI: the e_d term vanishes
        return -r * ga
    delta = 1.0 - e_d / sigma1_sq
    if delta <= SINGULAR_GUARD:
        raise DegenerateInputError(
            f"e_d = {e_d} coincides with sigma1_sq = {sigma1_sq}; use the integral form")
    if delta < SERIES_SWITCH:
        h = a * delta / (1.0 - delta)
        d1 = ga + 1.0 / a
        d2 = d1 - 1.0 / a**2
        d3 = d2 + 2.0 / a**3
        return r * a / (1.0 - delta) * (d1 + 0.5 * d2 * h + d3 * h * h / 6.0)
    b = 1.0 / (gamma_d * e_d)
    return r / delta * (exp_ei(b) - ga)


def capacity_at(L: int, L_p: float, B: float, link: CommLink, form: CapacityForm = "canonical") -> float:
    """Closed-form capacity for a possibly non-integer pilot count."""
    r = _prefactor(L, L_p, B)
    if form == "canonical":
        return capacity_from_error(r, link.sigma1_sq, link.gamma_d, data_error(link, L_p))
    if form == "as_printed":
        # first Ei argument written as (1 + gamma_p L_p) / gamma_d, dropping sigma1^2
        s = link.sigma1_sq
        u = (1.0 + link.gamma_p * L_p) / link.gamma_d
        a = 1.0 / (link.gamma_d * s)
        return r / (1.0 - 1.0 / (1.0 + s * link.gamma_p * L_p)) * (exp_ei(u) - exp_ei(a))
    raise ValueError(f"unknown capacity form {form!r}")


def ergodic_capacity(slot: SlotConfig, link: CommLink, *, form: CapacityForm = "canonical") -> CapacityResult:
    """Ergodic capacity from the Ei closed form.

    ``form="as_printed"`` evaluates the variant whose first Ei argument omits
    sigma1^2; it agrees with the canonical form only when sigma1^2 = 1 and is
    kept for comparison.
    """
    c = capacity_at(slot.L, slot.L_p, slot.B, link, form)
    return CapacityResult(c, data_error(link, slot.L_p), "closed")


def capacity_integral_from_error(r: float, sigma1_sq: float, gamma_d: float, e_d: float,
                                 spec: QuadSpec | None = None) -> float:
    a = gamma_d * sigma1_sq
    b = gamma_d * e_d

    def integrand(s):
        return np.exp(-s) / ((1.0 + a * s) * (1.0 + b * s))

    return r * a * integrate_semi_infinite(integrand, spec, vectorized=True)


def ergodic_capacity_integral(slot: SlotConfig, link: CommLink, spec: QuadSpec | None = None) -> CapacityResult:
    """Ergodic capacity by quadrature of the single-integral representation.

    Independent of the Ei evaluation; finite even where the closed form is 0/0.
    """
    e_d = data_error(link, slot.L_p)
    r = _prefactor(slot.L, slot.L_p, slot.B)
    return CapacityResult(capacity_integral_from_error(r, link.sigma1_sq, link.gamma_d, e_d, spec),
                          e_d, "integral")


def capacity_curve(slot: SlotConfig, link: CommLink, form: CapacityForm = "canonical") -> np.ndarray:
    """Capacity at every pilot count 1..L-1."""
    return np.array([capacity_at(slot.L, lp, slot.B, link, form) for lp in slot.pilot_grid])


def capacity_second_difference(slot: SlotConfig, link: CommLink) -> list[float]:
    """C(L_p - 1) - 2 C(L_p) + C(L_p + 1) for L_p = 2..L-2."""
    if slot.L < 4:
        raise ValueError(f"need L >= 4 for a second difference, got {slot.L}")
    c = capacity_curve(slot, link)
    # c[i] holds L_p = i + 1
    return [float(c[i - 2] - 2.0 * c[i - 1] + c[i]) for i in range(2, slot.L - 1)]


def is_concave_in_pilots(slot: SlotConfig, link: CommLink, rel_slack: float = 1e-9) -> bool:
    c = capacity_curve(slot, link)
    diffs = capacity_second_difference(slot, link)
    return all(d <= rel_slack * c[i + 1] for i, d in enumerate(diffs))


def is_unimodal(values) -> bool:
    """True if the sequence rises (weakly) to a single peak and then falls (weakly)."""
    v = list(values)
    m = int(np.argmax(v))
    return all(v[i] <= v[i + 1] for i in range(m)) and all(v[i] >= v[i + 1] for i in range(m, len(v) - 1))
