"""Range CRB of the pilot echo and its average over Rician fading."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import ConvergenceError, DegenerateInputError
from .specfun import hyp1f1_half

SPEED_OF_LIGHT = 299_792_458.0


@dataclass(frozen=True)
class SenseLink:
    """Echo link to the sensing target.

    ``gamma_ps`` is the transmit-side echo SNR rho_p / sigma_s^2. With
    ``path_loss`` on (the default) it is derated by 1 / (4 pi d^2) before
    entering the CRB, so the range ``d`` matters; switch it off to use
    ``gamma_ps`` as is. ``v`` and ``wavelength`` only shape the simulated echo.
    """

    A_s: float
    sigma2_sq: float
    s_rcs: float
    d: float
    B_rms: float
    gamma_ps: float
    c: float = SPEED_OF_LIGHT
    v: float = 0.0
    wavelength: float = 0.0107  # 28 GHz carrier
    sigma_s_sq: float | None = None
    path_loss: bool = True

    def __post_init__(self):
        if self.A_s < 0:
            raise ValueError(f"A_s must be >= 0, got {self.A_s}")
        for name in ("sigma2_sq", "s_rcs", "d", "B_rms", "gamma_ps", "c", "wavelength"):
            val = getattr(self, name)
            if not val > 0:
                raise ValueError(f"SenseLink.{name} must be positive, got {val}")

    @property
    def rician_factor(self) -> float:
        return self.A_s / self.sigma2_sq

    @property
    def effective_snr(self) -> float:
        if self.path_loss:
            return self.gamma_ps / (4.0 * math.pi * self.d**2)
        return self.gamma_ps

    def with_(self, **changes) -> "SenseLink":
        return replace(self, **changes)


def alpha_coeff(link: SenseLink) -> float:
    """alpha = c^2 / (8 pi^2 gamma s_rcs B_rms^2), in m^2."""
    return link.c**2 / (8.0 * math.pi**2 * link.effective_snr * link.s_rcs * link.B_rms**2)


def instantaneous_crb(alpha: float, L_p: float, gain: float) -> float:
    """Range CRB for one fading realisation: alpha / (L_p * gain)."""
    if not gain > 0:
        raise DegenerateInputError(f"sensing gain must be positive, got {gain}")
    return alpha / (L_p * gain)


def ergodic_crb_coefficient(link: SenseLink) -> float:
    """alpha * E[1/X] for the Rician gain X, i.e. the ergodic CRB at L_p = 1."""
    x = link.A_s / (2.0 * link.sigma2_sq)
    return (alpha_coeff(link) * math.sqrt(math.pi) * math.exp(-x) * hyp1f1_half(x)
            / math.sqrt(2.0 * link.sigma2_sq))


def ergodic_crb(link: SenseLink, L_p: float) -> float:
    """Ergodic range CRB from the 1F1 closed form; exactly proportional to 1/L_p."""
    if not L_p >= 1:
        raise ValueError(f"L_p must be >= 1, got {L_p}")
    return ergodic_crb_coefficient(link) / L_p


def ergodic_crb_series(link: SenseLink, L_p: float, terms: int = 50, *, check: bool = True) -> float:
    """Ergodic CRB by summing ``terms`` terms of the Bessel-expansion series.

    Term k is (1/2)(2 s2)^(k+1/2) (A_s / (4 s2^2))^k Gamma(k+1/2) / (k! Gamma(k+1)),
    computed through log-gamma so it shares no code with the Kummer series.
    With ``check`` set, raises ConvergenceError if the first omitted term is
    still above 1e-16 of the partial sum.
    """
    if terms < 1:
        raise ValueError(f"terms must be >= 1, got {terms}")
    s2 = link.sigma2_sq
    A = link.A_s

    def term(k):
        if A == 0.0:
            return 0.5 * math.sqrt(2.0 * s2) * math.sqrt(math.pi) if k == 0 else 0.0
        log_t = (math.log(0.5) + (k + 0.5) * math.log(2.0 * s2) + k * math.log(A / (4.0 * s2 * s2))
                 + math.lgamma(k + 0.5) - math.lgamma(k + 1.0) - math.lgamma(k + 1.0))
        return math.exp(log_t)

    parts = [term(k) for k in range(terms)]
    total = math.fsum(parts)
    if check:
        nxt = term(terms)
        if nxt > 1e-16 * total:
            raise ConvergenceError(
                f"CRB series not converged after {terms} terms (next/partial = {nxt / total:.3g})")
    return alpha_coeff(link) * math.exp(-A / (2.0 * s2)) / (L_p * s2) * total
