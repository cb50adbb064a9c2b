"""Test solver options and app settings."""
import numpy as np
from django.test import SimpleTestCase, override_settings

from pdhglp.conf import app_settings
from pdhglp.exceptions import ProblemParameterError
from pdhglp.options import MAX_ITERATIONS, Algorithm, Precision, SolverOptions


class TestSolverOptions(SimpleTestCase):
    """Test `SolverOptions` class."""

    def test_defaults(self):
        options = SolverOptions()
        self.assertEqual(options.eps_abs, 1e-4)
        self.assertEqual(options.eps_rel, 1e-4)
        self.assertEqual(options.eps_primal_infeasible, 1e-8)
        self.assertEqual(options.eps_feas_polish, 1e-6)
        self.assertEqual(options.iteration_limit, MAX_ITERATIONS)
        self.assertEqual(options.check_frequency, 64)
        self.assertEqual(options.algorithm, Algorithm.R2HPDHG)
        self.assertEqual(options.precision, Precision.F64)
        self.assertFalse(options.warm_start)
        self.assertEqual(SolverOptions.defaults()['display_frequency'], 10)

    def test_coerces_enums(self):
        options = SolverOptions(algorithm='rapdhg', precision='f32')
        self.assertIs(options.algorithm, Algorithm.RAPDHG)
        self.assertIs(options.precision.dtype, np.float32)

    def test_invalid(self):
        for kwargs in ({'eps_abs': 0.0}, {'eps_dual_infeasible': -1.0}, {'iteration_limit': 0},
                       {'check_frequency': 0}):
            with self.subTest(**kwargs):
                with self.assertRaises(ProblemParameterError):
                    SolverOptions(**kwargs)
        with self.assertRaises(ValueError):
            SolverOptions(algorithm='simplex')


class TestSettings(SimpleTestCase):
    """Test `app_settings`."""

    def test_defaults(self):
        self.assertEqual(app_settings.LOGGER_NAME, 'PDHG LP')
        self.assertEqual(app_settings.LOG_LEVEL, 'info')
        self.assertEqual(app_settings.RUIZ_ITERATIONS, 10)
        self.assertEqual(app_settings.POCK_CHAMBOLLE_ALPHA, 1.0)
        self.assertEqual(app_settings.RESULT_HANDLERS, [])

    @override_settings(PDHGLP_LOG_LEVEL='warning', PDHGLP_BATCH_WORKERS=2)
    def test_override(self):
        self.assertEqual(app_settings.LOG_LEVEL, 'warning')
        self.assertEqual(app_settings.BATCH_WORKERS, 2)
