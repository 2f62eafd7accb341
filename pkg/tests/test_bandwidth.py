import numpy as np
import pytest

from rankdyn.bandwidth import BandwidthGrid, cv_objective, select_bandwidths
from rankdyn.errors import DataError, DomainError, InsufficientDataError
from rankdyn.ranks import Bandwidths
from rankdyn.sample import FunctionalSample
from reference import epan_h, naive_cv_objective, trapezoid


class TestBandwidthGrid:
    def test_geometric_layout(self):
        grid = BandwidthGrid.geometric()
        assert len(grid.pairs) == 16
        assert grid.h_max == pytest.approx(0.3)
        hy = sorted({bw.h_y for bw in grid.pairs}, reverse=True)
        ht = sorted({bw.h_t for bw in grid.pairs}, reverse=True)
        assert hy == pytest.approx([2.4 * 0.6**u for u in range(4)])
        assert ht == pytest.approx([0.3 * 0.6**v for v in range(4)])

    def test_empty_rejected(self):
        with pytest.raises(DataError):
            BandwidthGrid([])

    def test_scaled_default_tracks_sample_spread(self, sim50):
        grid = BandwidthGrid.scaled_default(sim50.sample)
        # §5-scale data should land close to the canonical h_y values
        assert max(bw.h_y for bw in grid.pairs) == pytest.approx(2.4, rel=0.2)


class TestCvObjective:
    def test_finite_and_nonnegative(self, tiny_sample):
        val = cv_objective(tiny_sample, Bandwidths(0.8, 0.3), h_max=0.3)
        assert np.isfinite(val) and val >= 0.0

    def test_matches_bruteforce_triple_loop(self, tiny_sample):
        bw = Bandwidths(0.8, 0.3)
        ours = cv_objective(tiny_sample, bw, h_max=0.3)
        ref = naive_cv_objective(
            [list(t) for t in tiny_sample.times],
            [list(v) for v in tiny_sample.values],
            0.8, 0.3, 0.3,
        )
        assert ours == pytest.approx(ref, rel=1e-3)

    def test_two_constant_subjects_closed_form(self):
        # leave-one-out against a single constant curve: the smoothed cdf is
        # H((y - c_other)/h_y) at every interior time, so the objective is
        # m_interior * (I1 + I2) with I1, I2 one-dimensional integrals
        c1, c2, h_y, h_max = 1.0, 2.5, 0.9, 0.3
        grid = np.linspace(0, 1, 21)
        s = FunctionalSample.from_matrix(
            grid, np.vstack([np.full(21, c1), np.full(21, c2)])
        )
        ours = cv_objective(s, Bandwidths(h_y, 0.25), h_max=h_max)

        ys = [0.0 + 3.5 * k / 20000 for k in range(20001)]
        i1 = trapezoid(
            ys, [((1.0 if c1 <= y else 0.0) - epan_h((y - c2) / h_y)) ** 2 for y in ys]
        )
        i2 = trapezoid(
            ys, [((1.0 if c2 <= y else 0.0) - epan_h((y - c1) / h_y)) ** 2 for y in ys]
        )
        m_interior = int(np.sum((grid > h_max) & (grid < 1 - h_max)))
        assert i1 == pytest.approx(i2, rel=1e-9)
        assert ours == pytest.approx(m_interior * (i1 + i2), rel=2e-3)

    def test_relabeling_invariance(self, tiny_sample):
        bw = Bandwidths(0.7, 0.25)
        base = cv_objective(tiny_sample, bw, h_max=0.3)
        perm = FunctionalSample(
            ["c", "a", "b"],
            [tiny_sample.times[i].copy() for i in (2, 0, 1)],
            [tiny_sample.values[i].copy() for i in (2, 0, 1)],
        )
        assert cv_objective(perm, bw, h_max=0.3) == pytest.approx(base, abs=1e-10)

    def test_shift_invariance(self, tiny_sample):
        bw = Bandwidths(0.7, 0.25)
        base = cv_objective(tiny_sample, bw, h_max=0.3)
        shifted = FunctionalSample(
            list(tiny_sample.ids),
            [t.copy() for t in tiny_sample.times],
            [v + 11.25 for v in tiny_sample.values],
        )
        assert cv_objective(shifted, bw, h_max=0.3) == pytest.approx(base, abs=1e-10)

    def test_ragged_grids_match_bruteforce(self):
        times = [
            np.array([0.05, 0.35, 0.65, 0.95]),
            np.array([0.2, 0.4, 0.6, 0.8]),
            np.array([0.1, 0.45, 0.7, 0.9]),
        ]
        values = [
            np.array([0.0, 0.5, 1.0, 1.5]),
            np.array([2.0, 1.5, 1.0, 0.5]),
            np.array([1.0, 1.1, 0.9, 1.0]),
        ]
        s = FunctionalSample(["a", "b", "c"], times, values)
        assert s.shared_grid is None
        ours = cv_objective(s, Bandwidths(0.9, 0.3), h_max=0.3)
        ref = naive_cv_objective(
            [list(t) for t in times], [list(v) for v in values], 0.9, 0.3, 0.3
        )
        assert ours == pytest.approx(ref, rel=1e-3)

    def test_two_subjects_allowed_one_rejected(self):
        grid = np.linspace(0, 1, 11)
        pair = FunctionalSample.from_matrix(grid, np.vstack([np.zeros(11), np.ones(11)]))
        assert cv_objective(pair, Bandwidths(0.5, 0.2), h_max=0.25) >= 0.0
        solo = FunctionalSample.from_matrix(grid, np.zeros((1, 11)))
        with pytest.raises(InsufficientDataError):
            cv_objective(solo, Bandwidths(0.5, 0.2), h_max=0.25)

    def test_h_max_validation(self, tiny_sample):
        with pytest.raises(DomainError):
            cv_objective(tiny_sample, Bandwidths(0.5, 0.2), h_max=0.6)


class TestSelectBandwidths:
    def test_single_pair(self, tiny_sample):
        grid = BandwidthGrid([Bandwidths(0.8, 0.3)])
        report = select_bandwidths(tiny_sample, grid)
        assert report.chosen == Bandwidths(0.8, 0.3)
        assert len(report.entries) == 1

    def test_chosen_achieves_reported_minimum(self, sim50):
        grid = BandwidthGrid.geometric(steps=3)
        report = select_bandwidths(sim50.sample, grid)
        best = min(e.value for e in report.entries)
        chosen_value = next(e.value for e in report.entries if e.bw == report.chosen)
        assert chosen_value == best

    def test_batched_matches_single_pair_path(self, sim50):
        grid = BandwidthGrid.geometric(steps=2)
        report = select_bandwidths(sim50.sample, grid)
        for entry in report.entries:
            solo = cv_objective(sim50.sample, entry.bw, h_max=grid.h_max)
            assert entry.value == pytest.approx(solo, rel=1e-9)

    def test_deterministic(self, sim50):
        grid = BandwidthGrid.geometric(steps=2)
        a = select_bandwidths(sim50.sample, grid)
        b = select_bandwidths(sim50.sample, grid)
        assert a.chosen == b.chosen
        assert [e.value for e in a.entries] == [e.value for e in b.entries]

    def test_tie_break_prefers_small_h_t_then_h_y(self):
        # two identical constant subjects: the objective is identical for all
        # h_y large enough to saturate both indicator regions symmetrically
        grid_t = np.linspace(0, 1, 21)
        s = FunctionalSample.from_matrix(
            grid_t, np.vstack([np.zeros(21), np.ones(21)])
        )
        pairs = [Bandwidths(3.0, 0.25), Bandwidths(2.0, 0.25), Bandwidths(2.0, 0.2)]
        report = select_bandwidths(s, BandwidthGrid(pairs))
        values = [e.value for e in report.entries]
        if values[0] == values[1] == values[2]:
            assert report.chosen == Bandwidths(2.0, 0.2)
