"""Test `summary` module."""
import numpy as np
from django.test import SimpleTestCase

from pdhglp.problem import LpProblem
from pdhglp.results import InfeasibilityCertificate, KktResiduals, SolveResult, Status
from pdhglp.summary import SolveSummary

from .utils import infeasible_lp, tiny_lp


def make_result(**kwargs):
    options = {
        'status': Status.OPTIMAL,
        'primal_solution': np.array([0.0, 1.0]),
        'dual_solution': np.array([1.0]),
        'reduced_costs': np.array([1.0, 0.0]),
        'objective': 1.0,
        'dual_objective': 1.0,
        'kkt': KktResiduals(1e-9, 2e-9, 1.0, 1.0),
        'iterations': 42,
        'restarts': 3,
        'solve_time_sec': 0.25,
    }
    options.update(kwargs)
    return SolveResult(**options)


class TestSolveSummary(SimpleTestCase):
    """Test `SolveSummary` class."""

    def test_attributes(self):
        summary = SolveSummary(tiny_lp(), make_result(), 'r2hpdhg')
        self.assertEqual(summary.name, 'tiny')
        self.assertEqual(summary.n, 2)
        self.assertEqual(summary.num_inequalities, 1)
        self.assertEqual(summary.num_equalities, 0)
        self.assertIsNone(summary.objective_change)

    def test_unnamed(self):
        problem = LpProblem(c=[1.0])
        self.assertEqual(SolveSummary(problem, make_result(), 'rapdhg').name, 'unnamed problem')

    def test_render(self):
        text = SolveSummary(tiny_lp(), make_result(), 'r2hpdhg').render()
        self.assertIn('PDHG LP solve summary', text)
        self.assertIn('Problem: tiny', text)
        self.assertIn('Algorithm: r2hpdhg', text)
        self.assertIn('Status: Optimal', text)
        self.assertIn('Iterations: 42', text)
        self.assertIn('Restarts: 3', text)
        self.assertIn('Solve time (s): 0.250', text)
        self.assertIn('KKT residuals', text)
        self.assertNotIn('Feasibility polishing', text)
        self.assertNotIn('Infeasibility certificate', text)

    def test_render_polishing(self):
        result = make_result(objective=1.5, polish_iterations=7, objective_before_polish=1.0, polish_incomplete=True)
        summary = SolveSummary(tiny_lp(), result, 'r2hpdhg')
        self.assertEqual(summary.objective_change, 0.5)
        text = summary.render()
        self.assertIn('Feasibility polishing', text)
        self.assertIn('Polish iterations: 7', text)
        self.assertIn('Objective change: 0.5', text)
        self.assertIn('Polishing stopped at the iteration limit.', text)

    def test_render_certificate(self):
        certificate = InfeasibilityCertificate(Status.PRIMAL_INFEASIBLE, np.array([0.5, 0.5]), 0.5, 0.0)
        result = make_result(status=Status.PRIMAL_INFEASIBLE, certificate=certificate)
        text = SolveSummary(infeasible_lp(), result, 'rapdhg').render()
        self.assertIn('Status: PrimalInfeasible', text)
        self.assertIn('Infeasibility certificate', text)
        self.assertIn('Ray objective: 0.5', text)
