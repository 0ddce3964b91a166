import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isac_tradeoff.channel import CommLink, SlotConfig
from isac_tradeoff.errors import DegenerateInputError
from isac_tradeoff.metrics import (
    MetricConfig,
    efficiency,
    efficiency_curve,
    feasible_pilot_set,
    golden_section_max,
    optimize_pilot_length,
    utility,
    utility_terms,
)

from conftest import L, db, ref_comm, ref_sense, ref_slot
from oracles import brute_force_best_pilots


class TestConfig:
    @pytest.mark.parametrize("kwargs", [dict(kappa=-1), dict(eta=0.0), dict(eta=1.0),
                                        dict(u_c_th=1.5), dict(u_d_th=-0.1)])
    def test_validation(self, kwargs):
        with pytest.raises(ValueError):
            MetricConfig(**kwargs)


class TestEfficiency:
    def test_trivial_cases(self):
        cfg = MetricConfig(kappa=1.0)
        assert efficiency(5.0, 0.0, cfg) == 5.0
        assert efficiency(0.0, 3.0, cfg) == 0.0
        assert efficiency(6.0, 2.0, cfg) == 2.0

    def test_degenerate(self):
        with pytest.raises(DegenerateInputError):
            efficiency(1.0, 0.0, MetricConfig(kappa=0.0))

    def test_reference_curve_has_interior_peak(self, metric):
        eff = efficiency_curve(ref_slot(), ref_comm(), ref_sense(), metric)
        peak = int(np.argmax(eff)) + 1
        assert 1 < peak < L - 1
        # regression: brute-force peak at the reference set-up
        assert peak == brute_force_best_pilots(eff)
        assert peak == 6


class TestGoldenSection:
    def test_interior(self):
        x, fx = golden_section_max(lambda t: -(t - 2.3) ** 2, 0.0, 5.0)
        assert x == pytest.approx(2.3, abs=1e-8)
        assert fx == pytest.approx(0.0, abs=1e-15)

    def test_boundary_is_exact(self):
        assert golden_section_max(lambda t: t, 1.0, 13.0)[0] == 13.0
        assert golden_section_max(lambda t: -t, 1.0, 13.0)[0] == 1.0


def random_case(draw_snr_p, draw_snr_d, draw_snr_s, d, kappa):
    return ref_slot(), CommLink(2.0, db(draw_snr_p), db(draw_snr_d)), ref_sense(draw_snr_s, d=d), \
        MetricConfig(kappa=kappa)


class TestOptimizer:
    @settings(max_examples=60, deadline=None)
    @given(st.floats(-5, 25), st.floats(-5, 25), st.floats(-5, 25), st.floats(50, 500),
           st.sampled_from([0.0, 0.1, 1.0, 10.0]))
    def test_matches_exhaustive_search(self, sp, sd, ss, d, kappa):
        slot, comm, sense, cfg = random_case(sp, sd, ss, d, kappa)
        rep = optimize_pilot_length(slot, comm, sense, cfg)
        eff = efficiency_curve(slot, comm, sense, cfg)
        assert rep.converged
        assert rep.l_p_opt == brute_force_best_pilots(eff)
        assert rep.efficiency_opt == pytest.approx(eff.max(), rel=1e-12)
        hist = rep.q_history
        assert all(b >= a - 1e-12 * max(1.0, abs(a)) for a, b in zip(hist, hist[1:]))

    def test_report_fields(self, metric):
        rep = optimize_pilot_length(ref_slot(), ref_comm(), ref_sense(), metric)
        assert rep.converged and rep.iterations <= 10
        assert 1 <= rep.continuous_opt <= L - 1
        assert {lp for lp, _ in rep.candidates_examined} <= {math.floor(rep.continuous_opt),
                                                              math.ceil(rep.continuous_opt)}
        # continuous optimum bounds the integer one from above
        assert rep.efficiency_opt <= rep.q_star * (1 + 1e-12)
        assert rep.q_star == pytest.approx(rep.efficiency_opt, rel=1e-2)
        assert rep.q_star >= 0

    def test_clamp_low_at_high_snr(self, metric):
        rep = optimize_pilot_length(ref_slot(), ref_comm(40), ref_sense(40), metric)
        assert rep.continuous_opt == 1.0
        assert rep.l_p_opt == 1

    def test_clamp_high_smallest_slot(self):
        # L = 3: the continuous optimum lies in (1, 2) and rounds up to L - 1
        slot = SlotConfig(3, 1, 200e6)
        rep = optimize_pilot_length(slot, ref_comm(0), ref_sense(10), MetricConfig(kappa=0.0))
        assert 1 < rep.continuous_opt < 2
        assert rep.l_p_opt == 2

    def test_continuous_optimum_is_interior(self):
        # the log-derivative of C * L_p at L - 1 is negative, so the continuous optimum
        # never reaches the upper end, whatever the SNRs
        for sp in (-20, 0, 20):
            for sd in (-10, 10, 40):
                rep = optimize_pilot_length(ref_slot(), CommLink(2.0, db(sp), db(sd)),
                                            ref_sense(0, d=500), MetricConfig(kappa=0.0))
                assert rep.continuous_opt < L - 1

    def test_scale_invariance(self, metric):
        sense = ref_sense()
        base = optimize_pilot_length(ref_slot(B=1e6), ref_comm(), sense, metric)
        scaled = optimize_pilot_length(ref_slot(B=7e6), ref_comm(), sense, metric)
        assert scaled.l_p_opt == base.l_p_opt
        assert scaled.q_star == pytest.approx(7 * base.q_star, rel=1e-8)

    def test_iteration_budget(self, metric):
        rep = optimize_pilot_length(ref_slot(), ref_comm(), ref_sense(), metric, max_iter=1)
        assert not rep.converged
        assert 1 <= rep.l_p_opt <= L - 1


class TestUtility:
    def test_below_one_on_reference_grid(self, metric):
        for snr in range(-5, 26, 5):
            for lp in range(1, L):
                u = utility(ref_slot(), ref_comm(snr), ref_sense(snr), metric, lp)
                assert 0 < u < 1

    def test_saturation_limits(self):
        slot, comm, sense = ref_slot(), ref_comm(), ref_sense()
        peak = int(np.argmax([utility_terms(slot, comm, sense, MetricConfig(), lp)[1]
                              for lp in range(1, L)])) + 1
        near_one = MetricConfig(eta=1 - 1e-9)
        assert utility(slot, comm, sense, near_one, peak) == pytest.approx(1.0, abs=1e-8)
        near_zero = MetricConfig(eta=1e-9)
        assert utility(slot, comm, sense, near_zero, L - 1) == pytest.approx(1.0, abs=1e-8)

    def test_terms(self, metric):
        u, cap_ratio, crb_ratio = utility_terms(ref_slot(), ref_comm(), ref_sense(), metric, 13)
        assert crb_ratio == 1.0
        assert u == pytest.approx(0.5 * cap_ratio + 0.5, rel=1e-15)
        _, _, crb1 = utility_terms(ref_slot(), ref_comm(), ref_sense(), metric, 1)
        assert crb1 == pytest.approx(1 / 13, rel=1e-14)

    def test_pilot_bounds(self, metric):
        with pytest.raises(ValueError):
            utility(ref_slot(), ref_comm(), ref_sense(), metric, 14)

    @pytest.mark.parametrize("eta, shape", [(0.4, "up"), (0.5, "peak"), (0.6, "down")])
    def test_regimes(self, metric, eta, shape):
        cfg = replace(metric, eta=eta)
        slot, comm, sense = ref_slot(), ref_comm(10), ref_sense(10)
        feas = sorted(feasible_pilot_set(slot, comm, sense, cfg))
        u = [utility(slot, comm, sense, cfg, lp) for lp in feas]
        if shape == "up":
            assert all(b >= a for a, b in zip(u, u[1:]))
        elif shape == "down":
            assert all(b <= a for a, b in zip(u, u[1:]))
        else:
            m = int(np.argmax(u))
            assert 0 < m < len(u) - 1
            assert feas[m] == 4


class TestFeasibleSet:
    def test_reference_thresholds(self, metric):
        feas = feasible_pilot_set(ref_slot(), ref_comm(10), ref_sense(10), metric)
        assert feas == set(range(3, 12))

    def test_vacuous_thresholds(self):
        cfg = MetricConfig(u_c_th=0.0, u_d_th=0.0)
        assert feasible_pilot_set(ref_slot(), ref_comm(), ref_sense(), cfg) == set(range(1, L))

    def test_unit_thresholds_empty(self):
        cfg = MetricConfig(u_c_th=1.0, u_d_th=1.0)
        assert feasible_pilot_set(ref_slot(), ref_comm(), ref_sense(), cfg) == set()

    def test_shrinks_with_thresholds(self):
        slot, comm, sense = ref_slot(), ref_comm(), ref_sense()
        grid = np.linspace(0, 1, 11)
        for fixed in (0.0, 0.3):
            prev = None
            for th in grid:
                a = feasible_pilot_set(slot, comm, sense, MetricConfig(u_c_th=th, u_d_th=fixed))
                b = feasible_pilot_set(slot, comm, sense, MetricConfig(u_c_th=fixed, u_d_th=th))
                if prev is not None:
                    assert a <= prev[0] and b <= prev[1]
                prev = (a, b)
