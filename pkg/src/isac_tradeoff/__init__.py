"""Capacity / range-CRB trade-off of ISAC slots whose pilots double as the sensing probe.

Closed forms for the ergodic capacity under channel-estimation error and the
Rician-averaged range CRB, the efficiency and utility metrics built on them,
a Dinkelbach pilot-length optimiser, and Monte Carlo oracles for each.
"""
from . import _backend
from .capacity import CapacityResult, capacity_second_difference, ergodic_capacity, ergodic_capacity_integral
from .channel import CommLink, SlotConfig, data_error, pilot_error
from .errors import ConvergenceError, DegenerateInputError, DomainError
from .metrics import (
    MetricConfig,
    OptimizerReport,
    efficiency,
    feasible_pilot_set,
    optimize_pilot_length,
    utility,
)
from .montecarlo import McEstimate, McSpec, mc_ergodic_capacity, mc_ergodic_crb, simulate_slot, simulate_slots
from .sensing import SenseLink, alpha_coeff, ergodic_crb, ergodic_crb_series, instantaneous_crb
from .specfun import QuadSpec, bessel_i0, ei, hyp1f1_half, integrate_semi_infinite

__version__ = "0.1.0"


def backend() -> str:
    """Name of the active kernel backend, ``"compiled"`` or ``"python"``."""
    return _backend.name


set_backend = _backend.set_backend
