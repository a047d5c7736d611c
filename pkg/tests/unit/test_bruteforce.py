"""
Unit tests for exhaustive l0 minimization.
"""
import numpy as np
import pytest

from pybrex.exceptions import GuardViolation
from pybrex.solvers.bruteforce import brute_force_l0, enumerate_supports, select_best, support_table
from tests.fixtures.test_fixtures import quadratic_problem


@pytest.mark.unit
class TestBruteForce:

    def test_enumerate_supports(self):
        assert list(enumerate_supports(3, 1)) == [(), (0,), (1,), (2,)]
        assert len(list(enumerate_supports(4, 4))) == 16

    def test_table_values(self, identity_problem):
        table = support_table(identity_problem)
        assert [row.support for row in table.rows] == [(), (0,), (1,), (0, 1)]
        np.testing.assert_allclose(table.J0(0.3), [0.505, 0.305, 0.8, 0.6])

    def test_best_support(self, identity_problem):
        result = brute_force_l0(identity_problem)
        assert result.best_support == (0,)
        assert result.unique
        assert result.J0_value == pytest.approx(0.305)
        np.testing.assert_allclose(result.x_best, [1.0, 0.0])

    def test_lambda_extremes(self, identity_problem):
        table = support_table(identity_problem)
        assert select_best(table, 100.0).best_support == ()
        assert select_best(table, 1e-6).best_support == (0, 1)

    def test_ties_reported(self):
        p = quadratic_problem(np.eye(2), [1.0, 1.0], 0.5)
        result = brute_force_l0(p)
        assert not result.unique
        assert set(result.optima) == {(), (0,), (1,), (0, 1)}

    def test_unidentifiable_supports_skipped(self):
        p = quadratic_problem([[1.0, 1.0]], [1.0], 0.5)
        table = support_table(p)
        assert table.skipped == [(0, 1)]
        assert len(table.rows) == 3

    def test_k_max(self, identity_problem):
        table = support_table(identity_problem, k_max=1)
        assert all(len(row.support) <= 1 for row in table.rows)
        with pytest.raises(GuardViolation):
            support_table(identity_problem, k_max=3)

    def test_size_guard(self):
        p = quadratic_problem(np.ones((2, 25)), [1.0, 1.0], 0.5)
        with pytest.raises(GuardViolation):
            support_table(p)

    def test_workers_do_not_change_result(self, rng):
        p = quadratic_problem(rng.standard_normal((6, 6)), rng.standard_normal(6), 0.2)
        serial = support_table(p, workers=1)
        threaded = support_table(p, workers=3)
        assert [r.support for r in serial.rows] == [r.support for r in threaded.rows]
        np.testing.assert_array_equal(serial.J0(0.2), threaded.J0(0.2))
