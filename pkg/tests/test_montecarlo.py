import math

import numpy as np
import pytest

from isac_tradeoff.capacity import capacity_from_error, ergodic_capacity
from isac_tradeoff.channel import CommLink, SlotConfig
from isac_tradeoff.montecarlo import (
    CHUNK,
    McEstimate,
    McSpec,
    mc_ergodic_capacity,
    mc_ergodic_crb,
    simulate_slot,
    simulate_slots,
    stream,
)
from isac_tradeoff.sensing import alpha_coeff, ergodic_crb

from conftest import ref_comm, ref_sense, ref_slot

LINK = CommLink(2.0, 10.0, 10.0)
SLOT = SlotConfig(14, 4, 1.0)


class TestSpec:
    @pytest.mark.parametrize("kwargs", [dict(n_samples=0), dict(n_samples=5, master_seed=-1),
                                        dict(n_samples=5, master_seed=2**64),
                                        dict(n_samples=5, stream_id=-2)])
    def test_validation(self, kwargs):
        with pytest.raises(ValueError):
            McSpec(**kwargs)

    def test_streams_are_distinct(self):
        a = stream(McSpec(10, 1, 0), 1).random(4)
        b = stream(McSpec(10, 1, 1), 1).random(4)
        c = stream(McSpec(10, 1, 0), 2).random(4)
        d = stream(McSpec(10, 1, 0), 1, chunk=1).random(4)
        assert len({tuple(x) for x in (a, b, c, d)}) == 4

    def test_z_score(self):
        assert McEstimate(10.0, 2.0, 100).z_score(6.0) == 2.0


class TestCapacityOracle:
    def test_reference_point(self, backend):
        est = mc_ergodic_capacity(SLOT, LINK, McSpec(10**6, 3))
        closed = ergodic_capacity(SLOT, LINK).capacity
        assert abs(est.z_score(closed)) < 4
        assert abs(est.mean - closed) <= 5e-3 * closed

    def test_bit_identical_across_workers(self, backend):
        mc = McSpec(3 * CHUNK + 17, 42, 5)
        runs = {mc_ergodic_capacity(SLOT, LINK, mc, workers=w) for w in (1, 2, 4)}
        assert len(runs) == 1

    def test_seed_changes_result(self):
        a = mc_ergodic_capacity(SLOT, LINK, McSpec(1000, 1))
        b = mc_ergodic_capacity(SLOT, LINK, McSpec(1000, 2))
        assert a.mean != b.mean

    def test_perfect_csi(self):
        est = mc_ergodic_capacity(SLOT, LINK, McSpec(10**6, 9), e_d=0.0)
        r = 10 / math.log(2)
        closed = capacity_from_error(r, 2.0, 10.0, 0.0)
        assert abs(est.z_score(closed)) < 4

    def test_single_sample(self):
        est = mc_ergodic_capacity(SLOT, LINK, McSpec(1))
        assert est.n_samples == 1
        assert est.mean > 0
        assert math.isnan(est.std_error)

    def test_std_error_scaling(self):
        small = mc_ergodic_capacity(SLOT, LINK, McSpec(40_000, 11))
        large = mc_ergodic_capacity(SLOT, LINK, McSpec(160_000, 12))
        assert small.std_error / large.std_error == pytest.approx(2.0, rel=0.2)

    def test_orthogonal_variant_is_lower(self):
        full = mc_ergodic_capacity(SLOT, LINK, McSpec(200_000, 4))
        orth = mc_ergodic_capacity(SLOT, LINK, McSpec(200_000, 4), hat_variance="orthogonal")
        assert orth.mean < full.mean
        with pytest.raises(ValueError):
            mc_ergodic_capacity(SLOT, LINK, McSpec(10), hat_variance="other")


class TestCrbOracle:
    def test_reference_point(self, backend):
        sense = ref_sense()
        est = mc_ergodic_crb(sense, 3, McSpec(10**6, 5))
        assert abs(est.z_score(ergodic_crb(sense, 3))) < 4

    def test_rayleigh(self):
        sense = ref_sense(A_s=0.0, sigma2_sq=0.5)
        est = mc_ergodic_crb(sense, 1, McSpec(10**6, 6))
        expected = alpha_coeff(sense) * math.sqrt(math.pi) / math.sqrt(1.0)
        assert abs(est.z_score(expected)) < 4

    def test_alpha_linearity(self):
        mc = McSpec(5000, 8)
        one = mc_ergodic_crb(ref_sense(), 2, mc, alpha=1.0)
        two = mc_ergodic_crb(ref_sense(), 2, mc, alpha=2.0)
        assert two.mean == 2 * one.mean
        assert two.std_error == 2 * one.std_error

    def test_bit_identical_across_workers(self):
        mc = McSpec(2 * CHUNK + 1, 7)
        a = mc_ergodic_crb(ref_sense(), 1, mc, workers=1)
        b = mc_ergodic_crb(ref_sense(), 1, mc, workers=3)
        assert a == b


class TestSlotSimulator:
    def test_shapes_and_metadata(self):
        slot, sense = ref_slot(3), ref_sense()
        tr = simulate_slot(slot, ref_comm(), sense, McSpec(1, 0, 2))
        assert tr.pilot_rx.shape == (3,)
        assert tr.data_rx.shape == (11,)
        assert tr.echo_rx.shape == (3,)
        assert tr.true_range == 100.0
        assert tr.delay == pytest.approx(200.0 / sense.c)
        assert np.allclose(np.abs(tr.pilots), 1.0)

    def test_stream_selects_slot(self):
        args = (ref_slot(3), ref_comm(), ref_sense())
        a = simulate_slot(*args, McSpec(1, 0, 0))
        b = simulate_slot(*args, McSpec(1, 0, 1))
        c = simulate_slot(*args, McSpec(1, 0, 0))
        assert not np.array_equal(a.pilot_rx, b.pilot_rx)
        assert np.array_equal(a.pilot_rx, c.pilot_rx)

    def test_zero_speed_has_no_doppler(self):
        sense = ref_sense()
        tr = simulate_slots(ref_slot(5), ref_comm(), sense, McSpec(50), noise=False)
        amp = math.sqrt(sense.s_rcs / (4 * math.pi * sense.d**2))
        expected = amp * tr.h_sense[:, None] * tr.pilots
        np.testing.assert_allclose(tr.echo_rx, expected, rtol=1e-14)

    def test_doppler_phase(self):
        sense = ref_sense(v=30.0)
        slot = ref_slot(5)
        tr = simulate_slots(slot, ref_comm(), sense, McSpec(4), noise=False, symbol_duration=1e-6)
        rot = tr.echo_rx / (tr.h_sense[:, None] * tr.pilots)
        step = 4 * math.pi * 30.0 * 1e-6 / sense.wavelength
        np.testing.assert_allclose(np.angle(rot[:, 1] / rot[:, 0]), step, rtol=1e-12)

    def test_noiseless_identity(self):
        tr = simulate_slots(ref_slot(4), ref_comm(), ref_sense(), McSpec(20), pilot_power=2.5,
                            data_power=0.5, noise=False)
        np.testing.assert_array_equal(tr.pilot_rx, tr.h_comm[:, None] * math.sqrt(2.5) * tr.pilots)
        np.testing.assert_array_equal(tr.data_rx, tr.h_comm[:, None] * math.sqrt(0.5) * tr.data_symbols)

    def test_echo_power_moment(self):
        sense = ref_sense(A_s=3.0, sigma2_sq=1.0)
        tr = simulate_slots(ref_slot(1), ref_comm(), sense, McSpec(10**5, 1), noise=False)
        rho_pr = 1.0 / (4 * math.pi * sense.d**2)
        expected = rho_pr * sense.s_rcs * (3.0 + 2.0)
        assert np.mean(np.abs(tr.echo_rx) ** 2) == pytest.approx(expected, rel=0.01)

    def test_noise_variance(self):
        comm = ref_comm(10)
        tr = simulate_slots(ref_slot(6), comm, ref_sense(), McSpec(20_000, 2))
        resid = tr.pilot_rx - tr.h_comm[:, None] * tr.pilots
        assert np.mean(np.abs(resid) ** 2) == pytest.approx(1 / comm.gamma_p, rel=0.03)
