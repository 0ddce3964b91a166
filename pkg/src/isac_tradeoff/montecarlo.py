"""Monte Carlo oracles for the closed forms, and a slot-level signal generator.

Samples are split into fixed-size chunks. Chunk ``i`` of stream ``s`` draws
from Philox seeded with ``SeedSequence(master_seed, spawn_key=(tag, s, i))``,
and the per-chunk sums are combined with ``math.fsum`` (exactly rounded, so
order-free). The estimate is therefore bit-identical for any worker count.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Literal

import numpy as np

from . import _backend
from .channel import (
    CommLink,
    SlotConfig,
    data_error,
    sample_estimated_channel_power,
    sample_estimation_noise_power,
    sample_rician_gain,
)
from .sensing import SenseLink, alpha_coeff

CHUNK = 1 << 18

_TAG_CAPACITY = 1
_TAG_CRB = 2
_TAG_SLOT = 3


@dataclass(frozen=True)
class McSpec:
    n_samples: int
    master_seed: int = 0
    stream_id: int = 0

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValueError(f"n_samples must be >= 1, got {self.n_samples}")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")
        if self.stream_id < 0:
            raise ValueError("stream_id must be >= 0")


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float  # NaN when n_samples == 1
    n_samples: int

    def z_score(self, reference: float) -> float:
        return (self.mean - reference) / self.std_error


def stream(mc: McSpec, tag: int, chunk: int = 0) -> np.random.Generator:
    ss = np.random.SeedSequence(mc.master_seed, spawn_key=(tag, mc.stream_id, chunk))
    return np.random.Generator(np.random.Philox(ss))


def _chunk_sizes(n):
    full, rest = divmod(n, CHUNK)
    return [CHUNK] * full + ([rest] if rest else [])


def _reduce(mc: McSpec, tag: int, chunk_fn, workers: int) -> tuple[float, float]:
    sizes = _chunk_sizes(mc.n_samples)

    def run(i):
        return chunk_fn(stream(mc, tag, i), sizes[i])

    if workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, range(len(sizes))))
    else:
        parts = [run(i) for i in range(len(sizes))]
    return math.fsum(p[0] for p in parts), math.fsum(p[1] for p in parts)


def _estimate(total, total_sq, n, scale):
    mean = total / n
    if n == 1:
        return McEstimate(scale * mean, math.nan, 1)
    var = max(total_sq - total * mean, 0.0) / (n - 1)
    return McEstimate(scale * mean, abs(scale) * math.sqrt(var / n), n)


def mc_ergodic_capacity(slot: SlotConfig, link: CommLink, mc: McSpec, *, workers: int = 1,
                        e_d: float | None = None,
                        hat_variance: Literal["full", "orthogonal"] = "full") -> McEstimate:
    """Sample mean of B (L - L_p) log2(1 + |h_hat|^2 g / (1 + |w|^2 g)).

    |h_hat|^2 and |w|^2 are exponential with means sigma1^2 and e_d. Pass
    ``e_d`` to override the interpolation error (0 gives perfect CSI).
    ``hat_variance="orthogonal"`` gives the estimate variance sigma1^2 - e_d
    instead of sigma1^2, for sensitivity studies only.
    """
    if e_d is None:
        e_d = data_error(link, slot.L_p)
    hat_link = link
    if hat_variance == "orthogonal":
        hat_link = replace(link, sigma1_sq=link.sigma1_sq - e_d)
    elif hat_variance != "full":
        raise ValueError(f"unknown hat_variance {hat_variance!r}")
    kernels = _backend.kernels

    def chunk(rng, size):
        h = sample_estimated_channel_power(hat_link, rng, size)
        w = sample_estimation_noise_power(e_d, rng, size)
        return kernels.capacity_sums(h, w, link.gamma_d)

    total, total_sq = _reduce(mc, _TAG_CAPACITY, chunk, workers)
    return _estimate(total, total_sq, mc.n_samples, slot.B * (slot.L - slot.L_p))


def mc_ergodic_crb(sense: SenseLink, L_p: float, mc: McSpec, *, workers: int = 1,
                   alpha: float | None = None) -> McEstimate:
    """Sample mean of alpha / (L_p X) with X Rician; no truncation of deep fades."""
    if alpha is None:
        alpha = alpha_coeff(sense)
    kernels = _backend.kernels

    def chunk(rng, size):
        return kernels.inverse_sums(sample_rician_gain(sense.A_s, sense.sigma2_sq, rng, size))

    total, total_sq = _reduce(mc, _TAG_CRB, chunk, workers)
    return _estimate(total, total_sq, mc.n_samples, alpha / L_p)


@dataclass
class SlotTrace:
    """Received samples of one slot (1-D arrays) or a batch of slots (2-D, slot-major).

    ``delay`` is the round-trip time 2d/c; it is carried as metadata and not
    applied to the pilot sequence.
    """

    pilot_rx: np.ndarray
    data_rx: np.ndarray
    echo_rx: np.ndarray
    true_range: float
    true_speed: float
    delay: float
    pilots: np.ndarray
    data_symbols: np.ndarray
    h_comm: np.ndarray
    h_sense: np.ndarray


def _cn(rng, var, shape):
    return math.sqrt(var / 2.0) * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def simulate_slots(slot: SlotConfig, comm: CommLink, sense: SenseLink, mc: McSpec, *,
                   pilot_power: float = 1.0, data_power: float = 1.0, noise: bool = True,
                   symbol_duration: float | None = None) -> SlotTrace:
    """Generate ``mc.n_samples`` independent slots.

    Fading is constant within a slot. Pilots are unit-modulus QPSK, data
    symbols unit-power QPSK. Noise variances follow from the configured SNRs:
    rho_p / gamma_p, rho_d / gamma_d and rho_p / gamma_ps for the echo (or
    ``sense.sigma_s_sq`` if set). The echo carries amplitude
    sqrt(rho_p s_rcs / (4 pi d^2)) |h_s| and the Doppler phase
    exp(j 4 pi v t / lambda) at symbol times t = k * symbol_duration
    (default 1/B).
    """
    rng = stream(mc, _TAG_SLOT)
    n, L_p, L_d = mc.n_samples, slot.L_p, slot.L - slot.L_p
    t_sym = 1.0 / slot.B if symbol_duration is None else symbol_duration

    qpsk = np.exp(1j * np.pi / 4 * np.array([1, 3, 5, 7]))
    pilots = qpsk[rng.integers(0, 4, (n, L_p))]
    data = qpsk[rng.integers(0, 4, (n, L_d))]
    h = _cn(rng, comm.sigma1_sq, (n, 1))
    h_s = math.sqrt(sense.A_s) + _cn(rng, 2.0 * sense.sigma2_sq, (n, 1))

    rho_pr = pilot_power / (4.0 * math.pi * sense.d**2)
    doppler = np.exp(1j * 4.0 * math.pi * sense.v * np.arange(L_p) * t_sym / sense.wavelength)
    pilot_rx = h * math.sqrt(pilot_power) * pilots
    data_rx = h * math.sqrt(data_power) * data
    echo_rx = math.sqrt(rho_pr * sense.s_rcs) * h_s * pilots * doppler
    if noise:
        sigma_s_sq = sense.sigma_s_sq if sense.sigma_s_sq is not None else pilot_power / sense.gamma_ps
        pilot_rx = pilot_rx + _cn(rng, pilot_power / comm.gamma_p, (n, L_p))
        data_rx = data_rx + _cn(rng, data_power / comm.gamma_d, (n, L_d))
        echo_rx = echo_rx + _cn(rng, sigma_s_sq, (n, L_p))
    return SlotTrace(pilot_rx, data_rx, echo_rx, sense.d, sense.v, 2.0 * sense.d / sense.c,
                     pilots, data, h[:, 0], h_s[:, 0])


def simulate_slot(slot: SlotConfig, comm: CommLink, sense: SenseLink, mc: McSpec, **kwargs) -> SlotTrace:
    """One slot; ``mc.stream_id`` selects which one. ``mc.n_samples`` is ignored."""
    batch = simulate_slots(slot, comm, sense, replace(mc, n_samples=1), **kwargs)
    return SlotTrace(batch.pilot_rx[0], batch.data_rx[0], batch.echo_rx[0], batch.true_range,
                     batch.true_speed, batch.delay, batch.pilots[0], batch.data_symbols[0],
                     batch.h_comm[0], batch.h_sense[0])
