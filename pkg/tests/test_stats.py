import numpy as np
import pytest

from tcellsim.stats import (
    EXACT_METHOD,
    NORMAL_METHOD,
    _normal_two_sided_p,
    compare_trajectories,
    wilcoxon_rank_sum,
)
from tcellsim.trajectory import Trajectory
from util import brute_force_two_sided_p


def make_traj(n, np_=None, m=None):
    n = np.asarray(n, dtype=float)
    if np_ is None:
        np_ = np.zeros_like(n)
    if m is None:
        m = np.zeros_like(n)
    return Trajectory(
        times=np.arange(len(n), dtype=float),
        naive=n,
        naive_prolif=np.asarray(np_, dtype=float),
        memory=np.asarray(m, dtype=float),
    )


class TestWilcoxon:
    def test_extreme_split_exact_p(self):
        res = wilcoxon_rank_sum([1, 2, 3], [4, 5, 6])
        assert res.method == EXACT_METHOD
        assert res.p_value == 0.1
        assert res.u_statistic == 0.0

    def test_identical_multisets(self):
        x = [3.0, 1.0, 4.0, 1.0, 5.0]
        res = wilcoxon_rank_sum(x, list(x))
        assert res.p_value >= 0.99

    def test_empty_sample_rejected(self):
        with pytest.raises(ValueError, match="non-empty"):
            wilcoxon_rank_sum([], [1.0])

    def test_u_bounds_and_complement(self):
        rng = np.random.default_rng(6)
        for _ in range(25):
            n1 = int(rng.integers(1, 12))
            n2 = int(rng.integers(1, 12))
            x = rng.normal(size=n1)
            y = rng.normal(size=n2)
            u1 = wilcoxon_rank_sum(x, y).u_statistic
            u2 = wilcoxon_rank_sum(y, x).u_statistic
            assert 0.0 <= u1 <= n1 * n2
            assert u1 + u2 == pytest.approx(n1 * n2)

    def test_two_sided_symmetry_under_swap(self):
        rng = np.random.default_rng(7)
        for _ in range(25):
            x = rng.normal(size=int(rng.integers(2, 15)))
            y = rng.normal(size=int(rng.integers(2, 15)))
            assert wilcoxon_rank_sum(x, y).p_value == pytest.approx(
                wilcoxon_rank_sum(y, x).p_value, rel=1e-12
            )

    def test_invariant_under_monotone_transform(self):
        rng = np.random.default_rng(8)
        x = rng.normal(size=9)
        y = rng.normal(size=13) + 0.3
        base = wilcoxon_rank_sum(x, y)
        for transform in (np.exp, lambda v: 2.0 * v + 7.0, lambda v: v**3):
            res = wilcoxon_rank_sum(transform(x), transform(y))
            assert res.p_value == base.p_value
            assert res.u_statistic == base.u_statistic

    def test_exact_matches_brute_force_all_small_sizes(self):
        rng = np.random.default_rng(9)
        for n1 in range(1, 7):
            for n2 in range(1, 7):
                x = rng.normal(size=n1)
                y = rng.normal(size=n2)
                res = wilcoxon_rank_sum(x, y)
                assert res.method == EXACT_METHOD
                assert res.p_value == pytest.approx(brute_force_two_sided_p(x, y), abs=1e-12)

    def test_normal_approximation_close_to_exact(self):
        rng = np.random.default_rng(10)
        for _ in range(20):
            x = rng.normal(size=10)
            y = rng.normal(size=10)
            res = wilcoxon_rank_sum(x, y)
            assert res.method == EXACT_METHOD
            approx_p = _normal_two_sided_p(10, 10, res.u_statistic, [1] * 20)
            assert abs(approx_p - res.p_value) < 0.02

    def test_large_samples_use_normal_path(self):
        rng = np.random.default_rng(11)
        res = wilcoxon_rank_sum(rng.normal(size=50), rng.normal(size=60))
        assert res.method == NORMAL_METHOD
        assert 0.0 <= res.p_value <= 1.0

    def test_ties_force_normal_path(self):
        res = wilcoxon_rank_sum([1.0, 2.0, 2.0], [2.0, 3.0])
        assert res.method == NORMAL_METHOD


class TestCompareTrajectories:
    def test_identical_trajectories(self):
        rng = np.random.default_rng(12)
        values = rng.uniform(10, 1000, 40)
        a = make_traj(values)
        b = make_traj(values.copy())
        cmp = compare_trajectories(a, b, "N")
        assert cmp.result.p_value >= 0.99
        assert cmp.rms_difference == 0.0
        assert cmp.max_difference == 0.0

    def test_large_offset_is_detected(self):
        rng = np.random.default_rng(13)
        values = np.sort(rng.uniform(0, 100, 40))[::-1].copy()
        offset = 10.0 * (values.max() - values.min())
        cmp = compare_trajectories(make_traj(values), make_traj(values + offset), "N")
        assert cmp.result.p_value < 0.05
        assert cmp.max_difference == pytest.approx(offset)

    def test_quantity_selection(self):
        a = make_traj([1.0, 2.0], [10.0, 20.0], [5.0, 5.0])
        b = make_traj([1.0, 2.0], [11.0, 19.0], [5.0, 5.0])
        assert compare_trajectories(a, b, "M").rms_difference == 0.0
        assert compare_trajectories(a, b, "Np").max_difference == pytest.approx(1.0)
        assert compare_trajectories(a, b, "total").max_difference == pytest.approx(1.0)

    def test_mismatched_grids_rejected(self):
        a = make_traj([1.0, 2.0, 3.0])
        b = Trajectory(
            times=np.array([0.0, 0.5, 1.0]),
            naive=np.array([1.0, 2.0, 3.0]),
            naive_prolif=np.zeros(3),
            memory=np.zeros(3),
        )
        with pytest.raises(ValueError, match="time grid"):
            compare_trajectories(a, b, "N")

    def test_unknown_quantity_rejected(self):
        a = make_traj([1.0, 2.0])
        with pytest.raises(ValueError, match="quantity"):
            compare_trajectories(a, a, "X")
