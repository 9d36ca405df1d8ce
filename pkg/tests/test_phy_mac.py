import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from meshcap.grid import square_grid
from meshcap.phy_mac import (FRAME_LEN, PhyParams, certified_beta, channel_power_gain,
                             feasible_beta, make_schedule, min_sinr_over_frame, sinr)


class TestChannel:
    @pytest.mark.parametrize("d,gamma,expected", [(1, 4, 1.0), (2, 4, 0.0625), (3, 2.5, 3 ** -2.5)])
    def test_gain(self, d, gamma, expected):
        assert channel_power_gain(d, PhyParams(gamma=gamma)) == pytest.approx(expected, rel=1e-12)

    def test_gain_nonpositive_distance(self):
        with pytest.raises(ValueError):
            channel_power_gain(0.0, PhyParams())

    @pytest.mark.parametrize("kw", [{"power": 0}, {"noise": -1}, {"beta": 0}, {"gamma": 0}])
    def test_bad_params(self, kw):
        with pytest.raises(ValueError):
            PhyParams(**kw)


class TestSinr:
    def test_no_interference(self, grid6, phy):
        assert sinr(grid6, 0, 1, {0}, phy) == pytest.approx(phy.power / phy.noise)

    def test_brute_force_worst_case(self, grid6, sched6, phy):
        # oracle: explicit double loop over senders and all their neighbors
        worst = math.inf
        for senders in sched6.active_sets():
            for tx in senders:
                for rx in grid6.neighbors(int(tx)):
                    interf = 0.0
                    for k in senders:
                        if k == tx:
                            continue
                        d = math.dist(grid6.coord(rx), grid6.coord(int(k)))
                        interf += d ** -4
                    worst = min(worst, 1.0 / (1e-6 + interf))
        assert min_sinr_over_frame(grid6, sched6, phy) == pytest.approx(worst, rel=1e-12)

    def test_sinr_matches_frame_minimum(self, grid6, sched6, phy):
        vals = [sinr(grid6, int(tx), rx, set(map(int, s)), phy)
                for s in sched6.active_sets() for tx in s for rx in grid6.neighbors(int(tx))]
        assert min(vals) == pytest.approx(min_sinr_over_frame(grid6, sched6, phy), rel=1e-12)

    def test_receiver_transmitting_rejected(self, grid6, phy):
        with pytest.raises(ValueError):
            sinr(grid6, 0, 1, {0, 1}, phy)

    def test_interference_limited_power_doubling(self, grid6, sched6):
        lo = PhyParams(power=1.0, noise=1e-30)
        hi = PhyParams(power=2.0, noise=1e-30)
        senders = set(map(int, sched6.active_set(0)))
        assert sinr(grid6, 0, 1, senders, lo) == pytest.approx(sinr(grid6, 0, 1, senders, hi), rel=1e-9)

    @settings(max_examples=30, deadline=None)
    @given(st.floats(1e-3, 1e3))
    def test_scale_invariance(self, c):
        g = square_grid(6)
        senders = set(map(int, make_schedule(g).active_set(4)))
        a = sinr(g, 7, 8, senders, PhyParams(power=1.0, noise=1e-6))
        b = sinr(g, 7, 8, senders, PhyParams(power=c, noise=c * 1e-6))
        assert a == pytest.approx(b, rel=1e-9)

    def test_custom_receiver_rule(self, grid6, sched6, phy):
        right_or_left = lambda tx: tx + 1 if tx % 6 < 5 else tx - 1  # noqa: E731
        v = min_sinr_over_frame(grid6, sched6, phy, receiver_rule=right_or_left)
        assert v >= min_sinr_over_frame(grid6, sched6, phy)

    def test_non_neighbor_receiver_rejected(self, grid6, sched6, phy):
        with pytest.raises(ValueError):
            min_sinr_over_frame(grid6, sched6, phy, receiver_rule=lambda tx: (tx + 2) % 36)


class TestSchedule:
    def test_single_cell_labels(self, grid3):
        assert sorted(make_schedule(grid3).labels.tolist()) == list(range(1, 10))

    def test_six_by_six_four_per_label(self, sched6):
        counts = np.bincount(sched6.labels, minlength=10)[1:]
        assert counts.tolist() == [4] * 9

    def test_slot_five(self, grid6, sched6):
        assert sched6.label_of_slot(5) == 6
        active = sched6.active_set(5)
        assert len(active) == 4
        # one node per 3x3 cell
        cells = {((grid6.coord(v).row - 1) // 3, (grid6.coord(v).col - 1) // 3) for v in active}
        assert len(cells) == 4

    @pytest.mark.parametrize("L", [3, 9, 18, 30])
    def test_active_set_size(self, L):
        s = make_schedule(square_grid(L))
        assert all(len(s.active_set(t)) == L * L // 9 for t in range(FRAME_LEN))

    def test_consecutive_slots_disjoint(self, sched6):
        for t in range(20):
            assert not set(sched6.active_set(t)) & set(sched6.active_set(t + 1))

    def test_frame_covers_all_nodes_once(self, grid6, sched6):
        allv = np.concatenate(sched6.active_sets())
        assert sorted(allv.tolist()) == list(range(grid6.n))

    def test_neighbors_have_distinct_labels(self):
        g = square_grid(12)
        s = make_schedule(g)
        for v in range(g.n):
            assert all(s.label(u) != s.label(v) for u in g.neighbors(v))

    def test_same_label_separation(self):
        g = square_grid(12)
        s = make_schedule(g)
        for senders in s.active_sets():
            for a in senders:
                for b in senders:
                    if a != b:
                        assert g.manhattan(int(a), int(b)) >= 3

    def test_negative_slot(self, sched6):
        with pytest.raises(ValueError):
            sched6.active_set(-1)

    def test_periodic(self, sched6):
        assert np.array_equal(sched6.active_set(2), sched6.active_set(2 + 9 * 7))


class TestFeasibility:
    def test_single_cell_no_interference(self, grid3, phy):
        assert min_sinr_over_frame(grid3, make_schedule(grid3), phy) == pytest.approx(1e6)

    def test_gamma_two_rejected(self, grid6, sched6):
        with pytest.raises(ValueError):
            feasible_beta(grid6, sched6, PhyParams(gamma=2.0))

    def test_certified_margin(self, grid6, sched6, phy):
        assert certified_beta(grid6, sched6, phy) == pytest.approx(0.5 * feasible_beta(grid6, sched6, phy))

    def test_gamma_two_decays(self):
        p = PhyParams(gamma=2.0)
        vals = [min_sinr_over_frame(square_grid(L), make_schedule(square_grid(L)), p) for L in (9, 18, 36)]
        assert vals[0] > vals[1] > vals[2]

    def test_gamma_four_converges(self):
        p = PhyParams(gamma=4.0)
        a = min_sinr_over_frame(square_grid(18), make_schedule(square_grid(18)), p)
        b = min_sinr_over_frame(square_grid(36), make_schedule(square_grid(36)), p)
        assert b >= 0.9 * a
