import numpy as np
import pytest
import scipy.stats
from hypothesis import given, settings
from hypothesis import strategies as st

from hpolens import InsufficientDataError, TrialStatus, budget_correlation, spearman
from hpolens.budgets import average_ranks


class TestAverageRanks:
    def test_distinct_values(self):
        np.testing.assert_array_equal(average_ranks([30.0, 10.0, 20.0]), [3, 1, 2])

    def test_ties_get_average_positions(self):
        np.testing.assert_array_equal(average_ranks([1.0, 2.0, 2.0, 3.0]),
                                      [1.0, 2.5, 2.5, 4.0])

    def test_all_equal(self):
        np.testing.assert_array_equal(average_ranks([5.0, 5.0, 5.0]), [2.0, 2.0, 2.0])

    def test_matches_scipy_rankdata(self, rng):
        for _ in range(20):
            v = rng.integers(0, 6, size=int(rng.integers(2, 30))).astype(float)
            np.testing.assert_allclose(average_ranks(v), scipy.stats.rankdata(v))


class TestSpearman:
    def test_perfect_positive(self):
        assert spearman([1, 2, 3, 4, 5], [10, 20, 30, 40, 50]) == pytest.approx(1.0)

    def test_perfect_negative(self):
        assert spearman([1, 2, 3], [3, 2, 1]) == pytest.approx(-1.0)

    def test_single_swap_hand_value(self):
        # 1 - 6*2/(5*24) computed from rank displacements (0,0,0,1,1)
        assert spearman([1, 2, 3, 4, 5], [1, 2, 3, 5, 4]) == pytest.approx(0.9, abs=1e-9)

    def test_undefined_below_two_points(self):
        assert spearman([], []) is None
        assert spearman([1.0], [2.0]) is None

    def test_undefined_on_zero_variance(self):
        assert spearman([1, 1, 1], [1, 2, 3]) is None
        assert spearman([1, 2, 3], [7, 7, 7]) is None

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            spearman([1, 2], [1, 2, 3])

    def test_matches_scipy_with_ties(self, rng):
        for _ in range(30):
            n = int(rng.integers(2, 40))
            x = rng.integers(0, 8, size=n).astype(float)
            y = rng.integers(0, 8, size=n).astype(float)
            ours = spearman(x, y)
            expected = scipy.stats.spearmanr(x, y).statistic
            if ours is None:
                assert np.isnan(expected)
            else:
                assert ours == pytest.approx(expected, abs=1e-12)

    @given(st.lists(st.integers(-1000, 1000), min_size=2, max_size=30))
    @settings(max_examples=50, deadline=None)
    def test_invariant_under_monotone_transform(self, xs):
        rng = np.random.default_rng(len(xs))
        x = np.asarray(xs, dtype=float)
        y = rng.normal(size=len(x))
        base = spearman(x, y)
        # strictly increasing and exact on small integers: ties are preserved
        transformed = spearman(3.0 * x + 7.0, y)
        if base is None:
            assert transformed is None
        else:
            assert transformed == pytest.approx(base, abs=1e-12)


def two_budget_run(run_factory, simple_space, lo_values, hi_values, budgets=(1.0, 2.0)):
    n = len(lo_values)
    configs = {f"c{i:02d}": {"x1": 0.5, "x2": 0.5} for i in range(n)}
    trials = []
    for i, cid in enumerate(configs):
        if lo_values[i] is not None:
            trials.append({"config_id": cid, "budget": budgets[0],
                           "objectives": {"loss": lo_values[i]}})
        if hi_values[i] is not None:
            trials.append({"config_id": cid, "budget": budgets[1],
                           "objectives": {"loss": hi_values[i]}})
    return run_factory(simple_space, trials, budgets=list(budgets), configs=configs)


class TestBudgetCorrelation:
    def test_identical_order_gives_one(self, run_factory, simple_space):
        vals = [1.0, 2.0, 3.0, 4.0, 5.0]
        run = two_budget_run(run_factory, simple_space, vals, vals)
        res = budget_correlation(run, "loss")
        assert res.rho[0][1] == pytest.approx(1.0, abs=1e-9)
        assert res.n_common[0][1] == 5

    def test_reversed_order_gives_minus_one(self, run_factory, simple_space):
        run = two_budget_run(run_factory, simple_space,
                             [1.0, 2.0, 3.0, 4.0, 5.0], [5.0, 4.0, 3.0, 2.0, 1.0])
        assert budget_correlation(run, "loss").rho[0][1] == pytest.approx(-1.0, abs=1e-9)

    def test_single_swap_gives_point_nine(self, run_factory, simple_space):
        run = two_budget_run(run_factory, simple_space,
                             [1.0, 2.0, 3.0, 4.0, 5.0], [1.0, 2.0, 3.0, 5.0, 4.0])
        assert budget_correlation(run, "loss").rho[0][1] == pytest.approx(0.9, abs=1e-9)

    def test_matrix_symmetric_with_diagonal_one(self, run_factory, simple_space):
        run = two_budget_run(run_factory, simple_space,
                             [1.0, 2.0, 3.0], [3.0, 1.0, 2.0])
        res = budget_correlation(run, "loss")
        assert res.rho[0][1] == res.rho[1][0]
        assert res.rho[0][0] == pytest.approx(1.0)
        assert res.rho[1][1] == pytest.approx(1.0)

    def test_only_common_configs_enter(self, run_factory, simple_space):
        run = two_budget_run(run_factory, simple_space,
                             [1.0, 2.0, 3.0, None], [1.0, 2.0, None, 4.0])
        res = budget_correlation(run, "loss")
        assert res.n_common[0][1] == 2

    def test_undefined_when_fewer_than_two_common(self, run_factory, simple_space):
        run = two_budget_run(run_factory, simple_space,
                             [1.0, 2.0, None], [1.0, None, 3.0])
        res = budget_correlation(run, "loss")
        assert res.rho[0][1] is None
        assert res.n_common[0][1] == 1

    def test_undefined_on_constant_values(self, run_factory, simple_space):
        run = two_budget_run(run_factory, simple_space,
                             [7.0, 7.0, 7.0], [1.0, 2.0, 3.0])
        assert budget_correlation(run, "loss").rho[0][1] is None

    def test_needs_two_budgets(self, square_run):
        with pytest.raises(InsufficientDataError):
            budget_correlation(square_run, "loss")

    def test_failed_trials_ignored(self, run_factory, simple_space):
        configs = {"a": {"x1": 0.5, "x2": 0.5}, "b": {"x1": 0.1, "x2": 0.1}}
        trials = [
            {"config_id": "a", "budget": 1.0, "objectives": {"loss": 1.0}},
            {"config_id": "b", "budget": 1.0, "objectives": {"loss": 2.0}},
            {"config_id": "a", "budget": 2.0, "objectives": {"loss": 1.0}},
            {"config_id": "b", "budget": 2.0, "objectives": {},
             "status": TrialStatus.CRASHED},
        ]
        run = run_factory(simple_space, trials, budgets=[1.0, 2.0], configs=configs)
        res = budget_correlation(run, "loss")
        assert res.n_common[0][1] == 1 and res.rho[0][1] is None
