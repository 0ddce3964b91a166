"""Link configuration, channel-estimation error model, and fading samplers.

The samplers take a ``numpy.random.Generator`` owned by the caller. A
generator must not be shared between threads; :mod:`isac_tradeoff.montecarlo`
derives one per chunk from a seed sequence.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np


@dataclass(frozen=True)
class CommLink:
    """Rayleigh link to the communication user.

    sigma1_sq is the channel variance; gamma_p and gamma_d are the linear
    pilot and data SNRs.
    """

    sigma1_sq: float
    gamma_p: float
    gamma_d: float

    def __post_init__(self):
        for field in ("sigma1_sq", "gamma_p", "gamma_d"):
            val = getattr(self, field)
            if not (val > 0 and np.isfinite(val)):
                raise ValueError(f"CommLink.{field} must be positive and finite, got {val}")


@dataclass(frozen=True)
class SlotConfig:
    """A slot of ``L`` symbols, the first ``L_p`` of which are pilots."""

    L: int
    L_p: int
    B: float

    def __post_init__(self):
        if int(self.L) != self.L or int(self.L_p) != self.L_p:
            raise ValueError("L and L_p must be integers")
        if not 1 <= self.L_p <= self.L - 1:
            raise ValueError(f"need 1 <= L_p <= L - 1, got L_p={self.L_p}, L={self.L}")
        if not self.B > 0:
            raise ValueError(f"bandwidth must be positive, got {self.B}")

    def with_pilots(self, L_p: int) -> "SlotConfig":
        return SlotConfig(self.L, L_p, self.B)

    @property
    def pilot_grid(self) -> range:
        return range(1, self.L)


def pilot_error(link: CommLink) -> float:
    """Least-squares pilot-channel error sigma_p^2 / rho_p = 1 / gamma_p."""
    return 1.0 / link.gamma_p


def data_error(link: CommLink, L_p: float) -> float:
    """Expected data-channel error after Wiener interpolation from ``L_p`` pilots.

    Uses the reduced form sigma1^2 / (1 + sigma1^2 gamma_p L_p); see
    :func:`data_error_unsimplified` for the term-by-term version.
    """
    if not L_p >= 1:
        raise ValueError(f"L_p must be >= 1, got {L_p}")
    s = link.sigma1_sq
    return s / (1.0 + s * link.gamma_p * L_p)


def data_error_unsimplified(link: CommLink, L_p: float) -> float:
    """sigma1^2 - sigma1^2 / (1 + 1 / (sigma1^2 gamma_p L_p)), term by term.

    The subtraction cancels badly once e_d << sigma1^2 (about 1e3 ulp lost at
    sigma1^2 gamma_p L_p ~ 1e3 in doubles), so it is carried out in exact
    rational arithmetic on the binary inputs and rounded once.
    """
    s, g, n = Fraction(link.sigma1_sq), Fraction(link.gamma_p), Fraction(L_p)
    return float(s - s / (1 + 1 / (s * g * n)))


def sample_estimated_channel_power(link: CommLink, rng: np.random.Generator, size=None):
    """|h_hat_d|^2 draws: exponential with mean sigma1^2."""
    return link.sigma1_sq * rng.standard_exponential(size)


def sample_estimation_noise_power(e_d: float, rng: np.random.Generator, size=None):
    """|w_d,wf|^2 draws: exponential with mean ``e_d`` (all zeros when e_d == 0)."""
    if e_d < 0:
        raise ValueError(f"e_d must be >= 0, got {e_d}")
    return e_d * rng.standard_exponential(size)


def sample_rician_gain(A_s: float, sigma2_sq: float, rng: np.random.Generator, size=None):
    """Rician amplitude draws: |sqrt(A_s) + n| with n complex Gaussian of
    per-component variance ``sigma2_sq``.

    The LOS phase is fixed at zero; the amplitude law does not depend on it.
    """
    if A_s < 0 or not sigma2_sq > 0:
        raise ValueError(f"need A_s >= 0 and sigma2_sq > 0, got {A_s}, {sigma2_sq}")
    sd = np.sqrt(sigma2_sq)
    re = np.sqrt(A_s) + sd * rng.standard_normal(size)
    im = sd * rng.standard_normal(size)
    return np.hypot(re, im)

