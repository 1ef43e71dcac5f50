"""Binning scheme construction, assignment, and per-bin statistics."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from calbounds import BinningScheme, ScoredDataset, assign, bin_stats, umb_scheme, uwb_scheme


class TestUwbScheme:
    def test_single_bin(self):
        s = uwb_scheme(1)
        assert tuple(s.edges) == (0.0, 1.0)

    def test_equal_widths(self):
        s = uwb_scheme(4)
        assert tuple(s.edges) == (0.0, 0.25, 0.5, 0.75, 1.0)

    def test_zero_bins(self):
        with pytest.raises(ValueError):
            uwb_scheme(0)

    @given(st.integers(min_value=1, max_value=500))
    @settings(max_examples=50, deadline=None)
    def test_edges_exactly_i_over_b(self, B):
        s = uwb_scheme(B)
        assert s.B == B
        for i in range(B + 1):
            assert s.edges[i] == i / B


class TestUmbScheme:
    def test_order_statistic_edges(self):
        s = umb_scheme([0.1, 0.2, 0.3, 0.4], B=2)
        assert tuple(s.edges) == (0.0, 0.2, 1.0)
        assert not s.collapsed

    def test_all_tied_collapses_to_one_bin(self):
        with pytest.warns(UserWarning, match="collapsed"):
            s = umb_scheme([0.5, 0.5, 0.5, 0.5], B=2)
        assert s.B == 1
        assert s.collapsed

    def test_requires_2b_samples(self):
        with pytest.raises(ValueError, match="2B"):
            umb_scheme(np.linspace(0.1, 0.9, 10), B=6)

    def test_duplicate_interior_edges_merge(self):
        scores = [0.1, 0.5, 0.5, 0.5, 0.5, 0.9]
        with pytest.warns(UserWarning, match="collapsed"):
            s = umb_scheme(scores, B=3)
        assert s.B < 3
        # Every remaining bin holds at least one construction score.
        idx = assign(s, np.asarray(scores)) - 1
        assert set(idx) == set(range(s.B))

    def test_umb_mass_counts_formula(self):
        rng = np.random.default_rng(0)
        for trial in range(50):
            n = int(rng.integers(8, 200))
            B = int(rng.integers(1, n // 2 + 1))
            scores = rng.permutation(np.linspace(0.01, 0.99, n))
            s = umb_scheme(scores, B)
            assert not s.collapsed
            idx = assign(s, scores) - 1
            counts = np.bincount(idx, minlength=B)
            expected = np.array(
                [(n * b) // B - (n * (b - 1)) // B for b in range(1, B + 1)]
            )
            assert np.array_equal(counts, expected)
            assert counts.max() - counts.min() <= 1


class TestAssign:
    def test_right_closed_boundary(self):
        s = uwb_scheme(4)
        assert assign(s, 0.25) == 1
        assert assign(s, 0.2500001) == 2

    def test_zero_maps_to_first_bin(self):
        s = uwb_scheme(4)
        assert assign(s, 0.0) == 1

    def test_one_maps_to_last_bin(self):
        s = uwb_scheme(4)
        assert assign(s, 1.0) == 4

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            assign(uwb_scheme(2), 1.5)

    def test_total_function_on_grid(self):
        rng = np.random.default_rng(3)
        grid = np.linspace(0.0, 1.0, 10_000)
        for _ in range(5):
            interior = np.sort(rng.uniform(0.05, 0.95, size=6))
            s = BinningScheme(np.concatenate(([0.0], interior, [1.0])), "uwb")
            idx = assign(s, grid)
            assert np.all((idx >= 1) & (idx <= s.B))
            # Each grid point sits inside its assigned interval.
            assert np.all(grid <= s.edges[idx])
            positive = grid > 0
            assert np.all(grid[positive] > s.edges[idx[positive] - 1])


class TestBinStats:
    def test_single_bin_means(self):
        d = ScoredDataset([0.3, 0.3, 0.3], [0, 0, 1])
        stats = bin_stats(uwb_scheme(1), d)
        assert stats.counts[0] == 3
        assert stats.mean_scores[0] == pytest.approx(0.3)
        assert stats.mean_labels[0] == pytest.approx(1 / 3)
        assert stats.masses[0] == 1.0

    def test_empty_bins_have_zero_mass_and_nan_means(self):
        d = ScoredDataset([0.3, 0.35, 0.4], [1, 0, 1])
        stats = bin_stats(uwb_scheme(4), d)
        assert stats.counts[0] == 0 and stats.counts[2] == 0 and stats.counts[3] == 0
        assert stats.masses[0] == 0.0
        assert np.isnan(stats.mean_scores[0])

    def test_one_sample(self):
        d = ScoredDataset([0.9], [1])
        stats = bin_stats(uwb_scheme(2), d)
        assert stats.counts[1] == 1
        assert stats.mean_scores[1] == 0.9
        assert stats.mean_labels[1] == 1.0

    @given(
        st.lists(
            st.tuples(
                st.floats(min_value=0.0, max_value=1.0, allow_nan=False),
                st.integers(min_value=0, max_value=1),
            ),
            min_size=1,
            max_size=200,
        ),
        st.integers(min_value=1, max_value=30),
    )
    @settings(max_examples=60, deadline=None)
    def test_masses_sum_to_one_counts_to_n(self, pairs, B):
        d = ScoredDataset([p[0] for p in pairs], [p[1] for p in pairs])
        stats = bin_stats(uwb_scheme(B), d)
        assert stats.counts.sum() == len(d)
        assert abs(stats.masses.sum() - 1.0) < 1e-12


class TestSchemeSerialization:
    def test_json_round_trip_exact(self):
        s = umb_scheme(np.random.default_rng(5).uniform(size=40), B=7)
        back = BinningScheme.from_json(s.to_json())
        assert back.method == s.method
        assert np.array_equal(back.edges, s.edges)

    def test_invalid_edges_rejected(self):
        with pytest.raises(ValueError):
            BinningScheme(np.array([0.0, 0.5, 0.5, 1.0]), "uwb")
        with pytest.raises(ValueError):
            BinningScheme(np.array([0.1, 1.0]), "uwb")
