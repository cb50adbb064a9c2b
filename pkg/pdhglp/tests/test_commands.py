"""Test commands."""
import csv
import json
import os
import shutil
import tempfile
from io import StringIO
from unittest.mock import patch

import numpy as np
from django.core.management import CommandError, call_command
from django.test import SimpleTestCase
from numpy.testing import assert_allclose, assert_array_equal

from pdhglp.cli import EXIT_INFEASIBLE, EXIT_ITERATION_LIMIT, EXIT_OK, EXIT_USAGE, main
from pdhglp.formats import parse_mps, read_json_problem, write_json_problem, write_mps
from pdhglp.management.base import status_exit_code
from pdhglp.problem import gen_knapsack
from pdhglp.results import Status

from .utils import infeasible_lp, tiny_lp


class CommandTestCase(SimpleTestCase):

    def setUp(self):
        self.directory = tempfile.mkdtemp()
        self.addCleanup(shutil.rmtree, self.directory)

    def path(self, name, content=None):
        path = os.path.join(self.directory, name)
        if content is not None:
            with open(path, 'w') as target:
                target.write(content)
        return path

    def call(self, *args, **options):
        """Run a command and return its stdout and stderr."""
        stdout, stderr = StringIO(), StringIO()
        call_command(*args, stdout=stdout, stderr=stderr, **options)
        return stdout.getvalue(), stderr.getvalue()


class TestSolve(CommandTestCase):
    """Test `solve` command."""

    def test_solve(self):
        stdout, _ = self.call('solve', input=self.path('tiny.mps', write_mps(tiny_lp())), eps_abs=1e-8, eps_rel=1e-8)
        document = json.loads(stdout)
        self.assertEqual(document['status'], 'Optimal')
        self.assertAlmostEqual(document['objective'], 1.0, delta=1e-6)
        assert_allclose(document['x'], [0.0, 1.0], atol=1e-4)
        self.assertIn('kkt', document)

    def test_json_input_and_output(self):
        output = self.path('result.json')
        stdout, _ = self.call('solve', input=self.path('tiny.json', write_json_problem(tiny_lp())), output=output,
                              algorithm='rapdhg')
        self.assertEqual(stdout, '')
        with open(output) as source:
            self.assertEqual(json.load(source)['status'], 'Optimal')

    def test_explicit_format(self):
        stdout, _ = self.call('solve', input=self.path('tiny.txt', write_mps(tiny_lp())), format='mps')
        self.assertEqual(json.loads(stdout)['status'], 'Optimal')

    def test_infeasible(self):
        stdout = StringIO()
        with self.assertRaisesMessage(CommandError, "Solve ended with status PrimalInfeasible.") as context:
            call_command('solve', input=self.path('bad.mps', write_mps(infeasible_lp())), iteration_limit=10000,
                         stdout=stdout)
        self.assertEqual(context.exception.returncode, EXIT_INFEASIBLE)
        document = json.loads(stdout.getvalue())
        self.assertEqual(document['status'], 'PrimalInfeasible')
        self.assertIn('certificate', document)

    def test_iteration_limit(self):
        with self.assertRaises(CommandError) as context:
            self.call('solve', input=self.path('tiny.mps', write_mps(tiny_lp())), iteration_limit=5,
                      eps_abs=1e-10, eps_rel=1e-10)
        self.assertEqual(context.exception.returncode, EXIT_ITERATION_LIMIT)

    def test_warm_start(self):
        primal = self.path('x.json', '[0.0, 1.0]')
        dual = self.path('y.txt', '1.0\n')
        stdout, _ = self.call('solve', input=self.path('tiny.mps', write_mps(tiny_lp())), warm_start_primal=primal,
                              warm_start_dual=dual)
        self.assertEqual(json.loads(stdout)['iterations'], 0)

    def test_polishing(self):
        stdout, _ = self.call('solve', input=self.path('tiny.mps', write_mps(tiny_lp())), feasibility_polishing=True)
        document = json.loads(stdout)
        self.assertIn('objective_before_polish', document)
        self.assertLessEqual(document['kkt']['primal_residual'], 1e-6)

    def test_verbose(self):
        stdout, stderr = StringIO(), StringIO()
        with self.assertRaises(CommandError):
            call_command('solve', input=self.path('bad.mps', write_mps(infeasible_lp())), verbose=True,
                         check_frequency=8, display_frequency=1, iteration_limit=10000, stdout=stdout, stderr=stderr)
        self.assertIn('iter=8 ', stderr.getvalue())
        self.assertIn('PDHG LP solve summary', stderr.getvalue())
        self.assertIn('Infeasibility certificate', stderr.getvalue())

    def test_invalid_problem(self):
        document = {'c': [0.0], 'l': [1.0], 'u': [0.0]}
        with self.assertRaisesMessage(CommandError, "Invalid problem: crossed bounds at index 0") as context:
            self.call('solve', input=self.path('bad.json', json.dumps(document)))
        self.assertEqual(context.exception.returncode, EXIT_USAGE)

    def test_parse_error(self):
        with self.assertRaisesMessage(CommandError, "line 2: unknown section 'FOO'") as context:
            self.call('solve', input=self.path('bad.mps', 'NAME X\nFOO\n'))
        self.assertEqual(context.exception.returncode, EXIT_USAGE)

    def test_missing_file(self):
        with self.assertRaises(CommandError) as context:
            self.call('solve', input=self.path('missing.mps'))
        self.assertEqual(context.exception.returncode, EXIT_USAGE)

    def test_unknown_extension(self):
        with self.assertRaisesMessage(CommandError, "cannot tell the format"):
            self.call('solve', input=self.path('tiny.txt', write_mps(tiny_lp())))

    def test_warm_start_length(self):
        with self.assertRaisesMessage(CommandError, "warm start primal has length 3, expected 2"):
            self.call('solve', input=self.path('tiny.mps', write_mps(tiny_lp())),
                      warm_start_primal=self.path('x.json', '[0, 1, 2]'))

    def test_usage(self):
        with self.assertRaises(CommandError) as context:
            self.call('solve')
        self.assertEqual(context.exception.returncode, EXIT_USAGE)


class TestGenerate(CommandTestCase):
    """Test `generate` command."""

    def test_knapsack(self):
        stdout, _ = self.call('generate', 'knapsack', items=5, dims=2, seed=3)
        expected = gen_knapsack(5, 2, seed=3)
        problem = parse_mps(stdout)
        assert_array_equal(problem.c, expected.c)
        assert_array_equal(problem.G.to_dense(), expected.G.to_dense())
        assert_array_equal(problem.h, [-500.0, -500.0])

    def test_knapsack_options(self):
        values = self.path('values.txt', '1,2,3')
        stdout, _ = self.call('generate', 'knapsack', items=3, dims=1, capacity=7, values=values, format='json')
        problem = read_json_problem(stdout)
        assert_array_equal(problem.c, [-1.0, -2.0, -3.0])
        assert_array_equal(problem.h, [-7.0])

    def test_seeded(self):
        first, _ = self.call('generate', 'grid', k=3, seed=4)
        second, _ = self.call('generate', 'grid', k=3, seed=4)
        self.assertEqual(first, second)
        self.assertEqual(parse_mps(first).n, 40)

    def test_grid_costs(self):
        costs = self.path('costs.csv', '0,1\n2,3\n')
        output = self.path('grid.json')
        self.call('generate', 'grid', k=2, costs=costs, output=output)
        with open(output) as source:
            problem = read_json_problem(source.read())
        self.assertEqual(problem.n, 12)
        self.assertEqual(sorted(set(problem.c)), [0.0, 1.0, 2.0, 3.0])

    def test_invalid_grid(self):
        with self.assertRaisesMessage(CommandError, "grid side must be at least 2, got 1") as context:
            self.call('generate', 'grid', k=1)
        self.assertEqual(context.exception.returncode, EXIT_USAGE)

    def test_unknown_family(self):
        with self.assertRaises(CommandError) as context:
            self.call('generate', 'tsp')
        self.assertEqual(context.exception.returncode, EXIT_USAGE)


class TestRegret(CommandTestCase):
    """Test `regret` command."""

    def setUp(self):
        super().setUp()
        self.problem = self.path('knapsack.json', write_json_problem(gen_knapsack(4, 1, capacity=10, seed=0)))

    def costs(self, name, rows, header=True):
        lines = [','.join('c{}'.format(j) for j in range(len(rows[0])))] if header else []
        lines += [','.join(repr(value) for value in row) for row in rows]
        return self.path(name, '\n'.join(lines) + '\n')

    def test_regret(self):
        true = [[-1.0, -0.5, -0.8, -0.3], [-0.2, -0.9, -0.4, -1.0]]
        pred = [[-0.3, -1.0, -0.2, -0.9], [-1.0, -0.1, -0.9, -0.2]]
        stdout, _ = self.call('regret', input=self.problem, pred=self.costs('pred.csv', pred),
                              true=self.costs('true.csv', true, header=False), eps_abs=1e-8, eps_rel=1e-8)
        rows = list(csv.reader(StringIO(stdout)))
        self.assertEqual(rows[0], ['instance', 'numerator', 'denominator', 'regret'])
        self.assertEqual([row[0] for row in rows[1:]], ['0', '1', 'total'])
        numerators = np.array([float(row[1]) for row in rows[1:3]])
        denominators = np.array([float(row[2]) for row in rows[1:3]])
        self.assertTrue((numerators >= -1e-6).all())
        self.assertAlmostEqual(float(rows[3][1]), numerators.sum(), places=12)
        self.assertAlmostEqual(float(rows[3][3]), numerators.sum() / denominators.sum(), places=12)

    def test_true_predictions(self):
        true = [[-1.0, -0.5, -0.8, -0.3]]
        output = self.path('regret.csv')
        self.call('regret', input=self.problem, pred=self.costs('pred.csv', true), true=self.costs('true.csv', true),
                  output=output)
        with open(output) as source:
            rows = list(csv.reader(source))
        self.assertAlmostEqual(float(rows[-1][3]), 0.0, delta=1e-4)

    def test_ragged(self):
        ragged = self.path('pred.csv', '1,2,3,4\n1,2,3\n')
        with self.assertRaisesMessage(CommandError, "row 2 has 3 entries, expected 4.") as context:
            self.call('regret', input=self.problem, pred=ragged, true=self.costs('true.csv', [[1.0] * 4]))
        self.assertEqual(context.exception.returncode, EXIT_USAGE)

    def test_undefined(self):
        zeros = self.costs('zeros.csv', [[0.0] * 4])
        with self.assertRaisesMessage(CommandError, "normalized regret is undefined") as context:
            self.call('regret', input=self.problem, pred=zeros, true=zeros)
        self.assertEqual(context.exception.returncode, EXIT_USAGE)

    def test_inner_infeasible(self):
        costs = self.costs('costs.csv', [[1.0]])
        with self.assertRaises(CommandError) as context:
            self.call('regret', input=self.path('bad.mps', write_mps(infeasible_lp())), pred=costs, true=costs,
                      iteration_limit=10000)
        self.assertEqual(context.exception.returncode, EXIT_INFEASIBLE)


class TestMain(CommandTestCase):
    """Test the `pdhglp` entry point."""

    def test_success(self):
        with patch('sys.stdout', new_callable=StringIO) as stdout:
            main(['solve', '--input', self.path('tiny.mps', write_mps(tiny_lp()))])
        self.assertEqual(json.loads(stdout.getvalue())['status'], 'Optimal')

    def test_exit_codes(self):
        problem = self.path('bad.mps', write_mps(infeasible_lp()))
        tiny = self.path('tiny.mps', write_mps(tiny_lp()))
        cases = [
            (['solve', '--input', problem, '--iteration-limit', '10000'], EXIT_INFEASIBLE),
            (['solve', '--input', tiny, '--iteration-limit', '3', '--eps-abs', '1e-10', '--eps-rel', '1e-10'],
             EXIT_ITERATION_LIMIT),
            (['solve'], EXIT_USAGE),
            (['solve', '--input', problem, '--algorithm', 'simplex'], EXIT_USAGE),
            (['solve', '--input', self.path('missing.json')], EXIT_USAGE),
            (['solve', '--input', tiny, '--seed', '1'], EXIT_USAGE),
        ]
        for argv, code in cases:
            with self.subTest(argv=argv):
                with patch('sys.stdout', new_callable=StringIO), patch('sys.stderr', new_callable=StringIO):
                    with self.assertRaises(SystemExit) as context:
                        main(argv)
                self.assertEqual(context.exception.code, code)

    def test_status_exit_codes(self):
        self.assertEqual(status_exit_code(Status.OPTIMAL), EXIT_OK)
        self.assertEqual(status_exit_code(Status.PRIMAL_INFEASIBLE), EXIT_INFEASIBLE)
        self.assertEqual(status_exit_code(Status.DUAL_INFEASIBLE), EXIT_INFEASIBLE)
        self.assertEqual(status_exit_code(Status.ITERATION_LIMIT), EXIT_ITERATION_LIMIT)
