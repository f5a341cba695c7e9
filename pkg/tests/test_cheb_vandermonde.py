import math

import numpy as np
import pytest

from chebcoded.cheb_vandermonde import (
    BudgetExceededError,
    SubsetSpec,
    build_generator,
    gaussian_bound_trial,
    iter_column_subsets,
    sample_column_subsets,
    subset_cond_stats,
    take_columns,
    theorem_bound_value,
)
from chebcoded.linalg import Rng, cond
from chebcoded.poly_basis import cheb_grid


class TestBuildGenerator:
    def test_chebyshev_rows_on_grid(self):
        got = build_generator("chebyshev", 3, cheb_grid(3).points)
        r3 = math.sqrt(3) / 2
        want = np.array([[1, 1, 1], [r3, 0, -r3], [0.5, -1.0, 0.5]])
        assert got == pytest.approx(want, abs=1e-12)

    def test_monomial_rows(self):
        assert build_generator("monomial", 2, [0.0, 1.0]) == pytest.approx(
            np.array([[1.0, 1.0], [0.0, 1.0]]), abs=0
        )

    def test_normalized_first_row(self):
        got = build_generator("chebyshev_normalized", 1, [0.3])
        assert got == pytest.approx(np.array([[1 / math.sqrt(2)]]), abs=1e-12)

    def test_duplicate_points_rejected(self):
        with pytest.raises(ValueError):
            build_generator("chebyshev", 2, [0.5, 0.5])

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            build_generator("legendre", 2, [0.0, 1.0])

    @pytest.mark.parametrize("n", [2, 8, 16, 33, 64])
    def test_discrete_orthogonality(self, n):
        g = build_generator("chebyshev_normalized", n, cheb_grid(n).points)
        assert np.max(np.abs(g @ g.T - (n / 2.0) * np.eye(n))) <= 1e-9


class TestTakeColumns:
    def test_all_columns_is_identity(self):
        m = np.arange(12.0).reshape(3, 4)
        assert np.array_equal(take_columns(m, SubsetSpec(4, (1, 2, 3, 4))), m)

    def test_standard_basis_columns(self):
        got = take_columns(np.eye(3), SubsetSpec(3, (1, 3)))
        assert np.array_equal(got, np.eye(3)[:, [0, 2]])

    def test_selection_order(self):
        m = np.arange(15.0).reshape(3, 5)
        got = take_columns(m, SubsetSpec(5, (2, 4, 5)))
        assert np.array_equal(got, m[:, [1, 3, 4]])

    def test_subset_width_must_match(self):
        with pytest.raises(ValueError):
            take_columns(np.eye(3), SubsetSpec(4, (1, 2)))

    def test_subset_validation(self):
        with pytest.raises(ValueError):
            SubsetSpec(3, (2, 1))
        with pytest.raises(ValueError):
            SubsetSpec(3, (0, 1))
        with pytest.raises(ValueError):
            SubsetSpec(3, (1, 4))


class TestSubsetCondStats:
    def test_chebyshev_square_grid_is_sqrt2(self):
        for n in (2, 5, 11):
            stats = subset_cond_stats("chebyshev", n, cheb_grid(n).points, n, "spectral")
            assert stats.worst == pytest.approx(math.sqrt(2), rel=1e-9)
            assert stats.average == pytest.approx(math.sqrt(2), rel=1e-9)

    def test_normalized_square_grid_is_one(self):
        for n in (2, 6, 13):
            stats = subset_cond_stats(
                "chebyshev_normalized", n, cheb_grid(n).points, n, "spectral"
            )
            assert stats.worst == pytest.approx(1.0, rel=1e-9)

    def test_monomial_three_point_example(self):
        pts = [0.0, 1.0, 2.0]
        for norm in ("spectral", "frobenius"):
            stats = subset_cond_stats("monomial", 2, pts, 2, norm)
            conds = {
                s: cond(build_generator("monomial", 2, pts)[:, np.array(s) - 1], norm)
                for s in iter_column_subsets(3, 2)
            }
            assert stats.worst == pytest.approx(max(conds.values()), rel=1e-12)
            assert stats.average == pytest.approx(sum(conds.values()) / 3, rel=1e-12)
            assert stats.worst_subset.indices == (2, 3)

    def test_rectangular_subsets_rejected(self):
        with pytest.raises(ValueError):
            subset_cond_stats("chebyshev", 3, cheb_grid(5).points, 4)

    def test_oversized_subset_rejected(self):
        with pytest.raises(ValueError):
            subset_cond_stats("chebyshev", 6, cheb_grid(5).points, 6)

    def test_exhaustive_budget(self):
        with pytest.raises(BudgetExceededError):
            subset_cond_stats("chebyshev", 25, cheb_grid(60).points, 25)

    def test_sampled_requires_rng(self):
        with pytest.raises(ValueError):
            subset_cond_stats("chebyshev", 3, cheb_grid(8).points, 3, mode="sampled")

    def test_sampled_matches_exhaustive_when_budget_covers(self):
        pts = cheb_grid(6).points
        full = subset_cond_stats("chebyshev", 4, pts, 4, "frobenius")
        sampled = subset_cond_stats(
            "chebyshev", 4, pts, 4, "frobenius", mode="sampled", samples=100, rng=Rng(0)
        )
        assert sampled.worst == full.worst
        assert sampled.average == pytest.approx(full.average, rel=1e-12)

    def test_threaded_results_identical(self):
        pts = cheb_grid(9).points
        lone = subset_cond_stats("chebyshev", 7, pts, 7, "frobenius", threads=1)
        dual = subset_cond_stats("chebyshev", 7, pts, 7, "frobenius", threads=2)
        assert lone.worst == dual.worst
        assert lone.average == dual.average
        assert lone.worst_subset == dual.worst_subset


class TestSampling:
    def test_deterministic_per_seed(self):
        a = sample_column_subsets(30, 27, 50, Rng(7))
        b = sample_column_subsets(30, 27, 50, Rng(7))
        assert a == b

    def test_distinct_and_valid(self):
        subs = sample_column_subsets(20, 17, 200, Rng(3))
        assert len(set(subs)) == 200
        for s in subs:
            assert len(s) == 17 and s == tuple(sorted(s)) and 1 <= s[0] and s[-1] <= 20

    def test_covers_all_when_count_exceeds_total(self):
        subs = sample_column_subsets(5, 3, 100, Rng(0))
        assert subs == list(iter_column_subsets(5, 3))


class TestTheoremBound:
    def test_s1_example(self):
        assert theorem_bound_value(10, 1) == pytest.approx(9 * math.sqrt(90), rel=1e-12)

    def test_s2_example(self):
        assert theorem_bound_value(10, 2) == pytest.approx(8 * math.sqrt(160) * 200, rel=1e-12)

    def test_smallest_case(self):
        assert theorem_bound_value(2, 1) == pytest.approx(math.sqrt(2), rel=1e-12)

    def test_range_validation(self):
        with pytest.raises(ValueError):
            theorem_bound_value(10, 0)
        with pytest.raises(ValueError):
            theorem_bound_value(10, 10)

    @pytest.mark.parametrize("n,s", [(8, 1), (12, 2), (16, 1)])
    def test_dominates_measured_worst_case(self, n, s):
        stats = subset_cond_stats("chebyshev", n - s, cheb_grid(n).points, n - s, "frobenius")
        assert stats.worst <= 5.0 * theorem_bound_value(n, s)


class TestGeneratorComparisons:
    # all (n, s) pairs from the bound-dominance set with n - s >= 10
    AT_SCALE = [
        (n, s) for n in (6, 8, 12, 16, 20, 24) for s in (1, 2, 3) if n - s >= 10
    ]

    @pytest.mark.parametrize("n,s", AT_SCALE)
    def test_chebyshev_beats_monomial_at_scale(self, n, s):
        pts = cheb_grid(n).points
        cheb = subset_cond_stats("chebyshev", n - s, pts, n - s, "frobenius")
        mono = subset_cond_stats("monomial", n - s, pts, n - s, "frobenius")
        assert cheb.worst < mono.worst

    @pytest.mark.parametrize(
        "n,s", [(n, s) for n in (8, 12, 16) for s in (1, 2, 3)]
    )
    def test_normalized_within_sqrt2_of_plain(self, n, s):
        pts = cheb_grid(n).points
        plain = build_generator("chebyshev", n - s, pts)
        normalized = build_generator("chebyshev_normalized", n - s, pts)
        for subset in iter_column_subsets(n, n - s):
            idx = np.asarray(subset) - 1
            k_plain = cond(plain[:, idx], "frobenius")
            k_norm = cond(normalized[:, idx], "frobenius")
            assert k_norm < math.sqrt(2) * k_plain, subset


class TestGaussianBound:
    def test_vacuous_small_case(self):
        violations, bound_prob = gaussian_bound_trial(3, 4, 200, Rng(0))
        assert bound_prob == pytest.approx(5.6 / 4)
        assert violations / 200 <= bound_prob  # bound exceeds 1, always satisfied

    def test_degenerate_no_redundancy(self):
        violations, bound_prob = gaussian_bound_trial(3, 3, 10, Rng(1))
        assert bound_prob == pytest.approx(5.6)
        assert 0 <= violations <= 10

    def test_m_below_three_rejected(self):
        with pytest.raises(ValueError):
            gaussian_bound_trial(2, 5, 10, Rng(0))

    def test_workers_below_m_rejected(self):
        with pytest.raises(ValueError):
            gaussian_bound_trial(4, 3, 10, Rng(0))

    def test_enumeration_budget(self):
        with pytest.raises(BudgetExceededError):
            gaussian_bound_trial(15, 60, 1, Rng(0))
