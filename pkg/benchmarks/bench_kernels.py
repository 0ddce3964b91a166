"""Compiled vs pure-Python kernel timings.

    python benchmarks/bench_kernels.py [--repeat N]

Each row times the same call under both backends (best of N repeats) and
reports the speed-up. Results are printed as a plain-text table.
"""
import argparse
import timeit

import numpy as np

from isac_tradeoff import _backend, set_backend
from isac_tradeoff.channel import CommLink, SlotConfig
from isac_tradeoff.metrics import MetricConfig, optimize_pilot_length
from isac_tradeoff.montecarlo import McSpec, mc_ergodic_capacity, mc_ergodic_crb
from isac_tradeoff.sensing import SenseLink
from isac_tradeoff.specfun import bessel_i0, ei, hyp1f1_half


def cases():
    xs_ei = (-np.geomspace(1e-3, 50.0, 1000)).tolist()
    xs_i0 = np.linspace(0.0, 60.0, 1000).tolist()
    xs_f = np.linspace(0.0, 50.0, 1000).tolist()
    rng = np.random.default_rng(0)
    h = 2.0 * rng.standard_exponential(1 << 18)
    w = 0.05 * rng.standard_exponential(1 << 18)
    x = np.hypot(1.7 + rng.standard_normal(1 << 18), rng.standard_normal(1 << 18))
    slot = SlotConfig(14, 4, 200e6)
    comm = CommLink(2.0, 10.0, 10.0)
    sense = SenseLink(A_s=3.0, sigma2_sq=1.0, s_rcs=100.0, d=100.0, B_rms=200e6 / 12**0.5, gamma_ps=10.0)
    metric = MetricConfig()

    return [
        ("ei x1000", lambda: [ei(v) for v in xs_ei]),
        ("bessel_i0 x1000", lambda: [bessel_i0(v) for v in xs_i0]),
        ("hyp1f1_half x1000", lambda: [hyp1f1_half(v) for v in xs_f]),
        ("capacity_sums 2^18", lambda: _backend.kernels.capacity_sums(h, w, 10.0)),
        ("inverse_sums 2^18", lambda: _backend.kernels.inverse_sums(x)),
        ("mc_ergodic_capacity 1e6", lambda: mc_ergodic_capacity(slot, comm, McSpec(10**6))),
        ("mc_ergodic_crb 1e6", lambda: mc_ergodic_crb(sense, 4, McSpec(10**6))),
        ("optimize_pilot_length", lambda: optimize_pilot_length(slot, comm, sense, metric)),
    ]


def best_time(fn, repeat):
    fn()  # warm-up
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)

    if "compiled" not in _backend.available():
        print("compiled kernels not built; only the Python backend is available")
        return 1
    rows = []
    previous = _backend.name
    try:
        for label, fn in cases():
            t = {}
            for which in ("python", "compiled"):
                set_backend(which)
                t[which] = best_time(fn, args.repeat)
            rows.append((label, t["python"], t["compiled"]))
    finally:
        set_backend(previous)

    print(f"{'case':<26}{'python [ms]':>14}{'compiled [ms]':>16}{'speed-up':>11}")
    for label, tp, tc in rows:
        print(f"{label:<26}{tp * 1e3:>14.2f}{tc * 1e3:>16.2f}{tp / tc:>10.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
