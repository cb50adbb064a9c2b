"""Test the SPO+ loss and regret."""
import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose, assert_array_equal

from pdhglp.diffopt import (SpoBatch, SpoPlus, gen_knapsack_dataset, normalized_regret, regret_report,
                            spo_plus_loss, spo_plus_subgradient)
from pdhglp.exceptions import DimensionError, InnerSolveError, ProblemParameterError, UndefinedMetricError
from pdhglp.options import SolverOptions
from pdhglp.problem import gen_knapsack
from pdhglp.results import Status

from .utils import infeasible_lp, vertex_oracle

TIGHT = SolverOptions(eps_abs=1e-9, eps_rel=1e-9, iteration_limit=200000)


def knapsack_costs(count, n_items, seed):
    """Negated item values: costs of the minimization form."""
    return -np.random.default_rng(seed).uniform(0.5, 1.5, size=(count, n_items))


class KnapsackMixin:

    def setUp(self):
        self.feasible_set = gen_knapsack(6, 2, capacity=10, seed=0)
        self.true_costs = knapsack_costs(3, 6, seed=1)
        self.pred_costs = knapsack_costs(3, 6, seed=2)

    def oracle(self, cost):
        return vertex_oracle(self.feasible_set.with_objective(cost))


class TestSubgradient(SimpleTestCase):
    """Test `spo_plus_subgradient`."""

    def test_single(self):
        assert_array_equal(spo_plus_subgradient([[1.0, 0.0]], [[0.0, 1.0]], reduction='none'), [[2.0, -2.0]])

    def test_mean(self):
        gradient = spo_plus_subgradient([[1.0, 0.0], [1.0, 1.0]], [[0.0, 1.0], [1.0, 1.0]])
        assert_array_equal(gradient, [[1.0, -1.0], [0.0, 0.0]])

    def test_invalid(self):
        with self.assertRaises(DimensionError):
            spo_plus_subgradient([[1.0, 0.0]], [[1.0]])
        with self.assertRaises(ValueError):
            spo_plus_subgradient([[1.0]], [[1.0]], reduction='sum')


class TestSpoBatch(KnapsackMixin, SimpleTestCase):
    """Test `SpoBatch`."""

    def test_solve(self):
        batch = SpoBatch.solve(self.pred_costs, self.true_costs, self.feasible_set, TIGHT)
        self.assertEqual(len(batch), 3)
        for cost, solution in zip(self.true_costs, batch.true_sols):
            assert_allclose(solution, self.oracle(cost), atol=1e-4)
        assert_allclose(batch.true_objs, np.einsum('ij,ij->i', batch.true_costs, batch.true_sols))

    def test_inconsistent_objective(self):
        with self.assertRaisesMessage(ProblemParameterError, "batch member 0"):
            SpoBatch([[1.0]], [[1.0]], [[1.0]], [2.0])

    def test_shapes(self):
        with self.assertRaises(DimensionError):
            SpoBatch([[1.0, 2.0]], [[1.0]], [[1.0]], [1.0])
        with self.assertRaises(DimensionError):
            SpoBatch([[1.0]], [[1.0]], [[1.0]], [1.0, 2.0])


class TestSpoPlusLoss(KnapsackMixin, SimpleTestCase):
    """Test `spo_plus_loss` and `SpoPlus`."""

    def test_zero_for_true_costs(self):
        batch = SpoBatch.solve(self.true_costs, self.true_costs, self.feasible_set, TIGHT)
        loss, _ = spo_plus_loss(batch, self.feasible_set, TIGHT)
        self.assertAlmostEqual(loss, 0.0, delta=1e-6)

    def test_matches_oracle(self):
        batch = SpoBatch.solve(self.pred_costs, self.true_costs, self.feasible_set, TIGHT)
        loss, inner_sols = spo_plus_loss(batch, self.feasible_set, TIGHT)
        losses = []
        for pred, true, true_sol in zip(self.pred_costs, self.true_costs, batch.true_sols):
            inner = self.oracle(2 * pred - true)
            losses.append(-(2 * pred - true) @ inner + 2 * pred @ true_sol - true @ true_sol)
        self.assertAlmostEqual(loss, np.mean(losses), delta=1e-5)
        self.assertGreaterEqual(loss, -1e-6)
        gradient = spo_plus_subgradient(batch.true_sols, inner_sols)
        expected = [2 * (self.oracle(true) - self.oracle(2 * pred - true)) / 3
                    for pred, true in zip(self.pred_costs, self.true_costs)]
        assert_allclose(gradient, expected, atol=1e-4)

    def test_inner_failure(self):
        batch = SpoBatch([[1.0]], [[1.0]], [[0.0]], [0.0])
        with self.assertRaises(InnerSolveError) as context:
            spo_plus_loss(batch, infeasible_lp(), SolverOptions(iteration_limit=10000))
        self.assertEqual(context.exception.index, 0)
        self.assertEqual(context.exception.status, Status.PRIMAL_INFEASIBLE.value)

    def test_module(self):
        batch = SpoBatch.solve(self.pred_costs, self.true_costs, self.feasible_set, TIGHT)
        spo_plus = SpoPlus(self.feasible_set, TIGHT)
        self.assertTrue(spo_plus.options.warm_start)
        loss, gradient = spo_plus(batch, keys=['a', 'b', 'c'])
        expected_loss, inner_sols = spo_plus_loss(batch, self.feasible_set, TIGHT)
        self.assertAlmostEqual(loss, expected_loss, delta=1e-6)
        assert_allclose(gradient, spo_plus_subgradient(batch.true_sols, inner_sols), atol=1e-4)
        self.assertEqual(set(spo_plus._previous), {'a', 'b', 'c'})

        # The second pass starts from the first pass' solutions
        again, _ = spo_plus(batch, keys=['a', 'b', 'c'])
        self.assertAlmostEqual(again, loss, delta=1e-6)
        spo_plus.reset()
        self.assertEqual(spo_plus._previous, {})

    def test_module_keys(self):
        batch = SpoBatch([[1.0]], [[1.0]], [[0.0]], [0.0])
        with self.assertRaises(DimensionError):
            SpoPlus(infeasible_lp())(batch, keys=[1, 2])


class TestRegret(KnapsackMixin, SimpleTestCase):
    """Test `regret_report` and `normalized_regret`."""

    def test_true_costs(self):
        report = regret_report(self.true_costs, self.true_costs, self.feasible_set, TIGHT)
        assert_allclose(report.numerators, 0.0, atol=1e-6)
        self.assertAlmostEqual(report.normalized_regret, 0.0, delta=1e-6)

    def test_matches_oracle(self):
        report = regret_report(self.pred_costs, self.true_costs, self.feasible_set, TIGHT)
        numerators, denominators = [], []
        for pred, true in zip(self.pred_costs, self.true_costs):
            true_sol = self.oracle(true)
            numerators.append(true @ (self.oracle(pred) - true_sol))
            denominators.append(abs(true @ true_sol))
        assert_allclose(report.numerators, numerators, atol=1e-5)
        assert_allclose(report.denominators, denominators, rtol=1e-6)
        self.assertTrue((report.numerators >= -1e-6).all())
        self.assertAlmostEqual(report.normalized_regret, sum(numerators) / sum(denominators), delta=1e-5)
        self.assertAlmostEqual(normalized_regret(self.pred_costs, self.true_costs, self.feasible_set, TIGHT),
                               report.normalized_regret, delta=1e-9)
        assert_allclose(report.regrets, report.numerators / report.denominators)

    def test_zero_denominator(self):
        with self.assertRaises(UndefinedMetricError):
            regret_report(np.zeros((2, 6)), np.zeros((2, 6)), self.feasible_set)

    def test_count_mismatch(self):
        with self.assertRaises(DimensionError):
            regret_report(self.pred_costs[:2], self.true_costs, self.feasible_set)
        with self.assertRaises(DimensionError):
            regret_report(self.pred_costs[:, :3], self.true_costs, self.feasible_set)


class TestDataset(SimpleTestCase):
    """Test `gen_knapsack_dataset`."""

    def test_shapes(self):
        features, values = gen_knapsack_dataset(10, 5, 8, deg=2, noise_width=0.5, seed=0)
        self.assertEqual(features.shape, (10, 5))
        self.assertEqual(values.shape, (10, 8))

    def test_seeded(self):
        first = gen_knapsack_dataset(4, 3, 5, seed=1)
        second = gen_knapsack_dataset(4, 3, 5, seed=1)
        assert_array_equal(first[1], second[1])

    def test_noise_free(self):
        # Without noise every value is a fixed polynomial of the features
        _, values = gen_knapsack_dataset(50, 5, 4, deg=2, seed=2)
        self.assertTrue((values >= 1).all())

    def test_invalid(self):
        with self.assertRaises(ProblemParameterError):
            gen_knapsack_dataset(0, 5, 4)
        with self.assertRaises(ProblemParameterError):
            gen_knapsack_dataset(5, 5, 4, deg=0)
        with self.assertRaises(ProblemParameterError):
            gen_knapsack_dataset(5, 5, 4, noise_width=1.0)
