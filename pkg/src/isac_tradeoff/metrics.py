"""Efficiency and utility of the capacity/CRB trade-off, and pilot-length optimisation."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .capacity import CapacityForm, capacity_at
from .channel import CommLink, SlotConfig
from .errors import DegenerateInputError
from .sensing import SenseLink, ergodic_crb

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class MetricConfig:
    kappa: float = 1.0
    eta: float = 0.5
    u_c_th: float = 0.0
    u_d_th: float = 0.0

    def __post_init__(self):
        if not self.kappa >= 0:
            raise ValueError(f"kappa must be >= 0, got {self.kappa}")
        if not 0.0 < self.eta < 1.0:
            raise ValueError(f"eta must lie in (0, 1), got {self.eta}")
        for name in ("u_c_th", "u_d_th"):
            val = getattr(self, name)
            if not 0.0 <= val <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {val}")


@dataclass
class OptimizerReport:
    l_p_opt: int
    q_star: float
    iterations: int
    converged: bool
    candidates_examined: list[tuple[int, float]]
    continuous_opt: float
    efficiency_opt: float
    q_history: list[float] = field(default_factory=list)


def efficiency(C: float, crb: float, cfg: MetricConfig) -> float:
    """Capacity per unit of range error, C / (kappa + CRB)."""
    denom = cfg.kappa + crb
    if denom <= 0:
        raise DegenerateInputError("kappa + crb must be positive")
    return C / denom


def efficiency_curve(slot: SlotConfig, comm: CommLink, sense: SenseLink, cfg: MetricConfig,
                     form: CapacityForm = "canonical") -> np.ndarray:
    """Efficiency at each integer pilot count 1..L-1."""
    return np.array([
        efficiency(capacity_at(slot.L, lp, slot.B, comm, form), ergodic_crb(sense, lp), cfg)
        for lp in slot.pilot_grid
    ])


def golden_section_max(f, lo: float, hi: float, xtol: float = 1e-10, max_iter: int = 200):
    """Maximise a unimodal ``f`` on [lo, hi]; returns (x, f(x)).

    The endpoints are evaluated too, so a maximum on the boundary is returned
    exactly rather than approached.
    """
    a, b = lo, hi
    x1 = b - INV_PHI * (b - a)
    x2 = a + INV_PHI * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if b - a <= xtol * max(1.0, abs(a) + abs(b)):
            break
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + INV_PHI * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - INV_PHI * (b - a)
            f1 = f(x1)
    best = max([(f1, x1), (f2, x2), (f(lo), lo), (f(hi), hi)], key=lambda t: t[0])
    return best[1], best[0]


def optimize_pilot_length(slot: SlotConfig, comm: CommLink, sense: SenseLink, cfg: MetricConfig, *,
                          tol: float = 1e-9, max_iter: int = 100,
                          form: CapacityForm = "canonical") -> OptimizerReport:
    """Pilot count maximising C / (kappa + CRB) by Dinkelbach iteration.

    Each step maximises C(x) - q (kappa + CRB(x)) over real x in [1, L-1] and
    sets q to the ratio at the maximiser, stopping once the subtractive
    objective is within ``tol * max(1, q)`` of zero. The integer answer is the
    better of the two neighbours of the continuous optimum (smaller on ties).
    """
    L, B = slot.L, slot.B
    lo, hi = 1.0, float(L - 1)

    def cap(x):
        return capacity_at(L, x, B, comm, form)

    def denom(x):
        return cfg.kappa + ergodic_crb(sense, x)

    q = 0.0
    history = [q]
    x_prev = None
    converged = False
    iterations = 0
    x = lo
    while iterations < max_iter:
        iterations += 1

        def sub(t, q=q):
            return cap(t) - q * denom(t)

        x, fx = golden_section_max(sub, lo, hi)
        # never step to a worse point than the previous iterate; keeps q monotone
        if x_prev is not None and sub(x_prev) > fx:
            x, fx = x_prev, sub(x_prev)
        if abs(fx) <= tol * max(1.0, q):
            converged = True
            break
        q = cap(x) / denom(x)
        history.append(q)
        x_prev = x

    # clamp to the feasible interval, then pick the better integer neighbour
    x = min(max(x, lo), hi)
    candidates = sorted({int(math.floor(x)), int(math.ceil(x))})
    examined = [(lp, efficiency(cap(lp), ergodic_crb(sense, lp), cfg)) for lp in candidates]
    best_lp, best_eff = examined[0]
    for lp, eff in examined[1:]:
        if eff > best_eff * (1.0 + 1e-12):
            best_lp, best_eff = lp, eff
    return OptimizerReport(
        l_p_opt=best_lp,
        q_star=q,
        iterations=iterations,
        converged=converged,
        candidates_examined=examined,
        continuous_opt=x,
        efficiency_opt=best_eff,
        q_history=history,
    )


def _references(slot, comm, sense, form):
    caps = np.array([capacity_at(slot.L, lp, slot.B, comm, form) for lp in slot.pilot_grid])
    return caps, float(caps.max()), ergodic_crb(sense, slot.L - 1)


def utility_terms(slot: SlotConfig, comm: CommLink, sense: SenseLink, cfg: MetricConfig, L_p: int,
                  form: CapacityForm = "canonical") -> tuple[float, float, float]:
    """(utility, C / C_max, CRB_min / CRB) at ``L_p``.

    C_max is the largest capacity over integer pilot counts 1..L-1 and CRB_min
    the CRB at L_p = L - 1, where it is smallest.
    """
    if not 1 <= L_p <= slot.L - 1:
        raise ValueError(f"need 1 <= L_p <= L - 1, got {L_p}")
    caps, c_max, crb_min = _references(slot, comm, sense, form)
    cap_ratio = float(caps[L_p - 1]) / c_max
    crb_ratio = crb_min / ergodic_crb(sense, L_p)
    return cfg.eta * cap_ratio + (1.0 - cfg.eta) * crb_ratio, cap_ratio, crb_ratio


def utility(slot: SlotConfig, comm: CommLink, sense: SenseLink, cfg: MetricConfig, L_p: int,
            form: CapacityForm = "canonical") -> float:
    return utility_terms(slot, comm, sense, cfg, L_p, form)[0]


def feasible_pilot_set(slot: SlotConfig, comm: CommLink, sense: SenseLink, cfg: MetricConfig,
                       form: CapacityForm = "canonical") -> set[int]:
    """Pilot counts meeting both the capacity- and sensing-utility thresholds (may be empty)."""
    caps, c_max, crb_min = _references(slot, comm, sense, form)
    out = set()
    for lp in slot.pilot_grid:
        if caps[lp - 1] / c_max >= cfg.u_c_th and crb_min / ergodic_crb(sense, lp) >= cfg.u_d_th:
            out.add(lp)
    return out
