import csv
import json
import logging
from importlib import import_module

import numpy as np

from pdhglp.conf import app_settings
from pdhglp.options import Algorithm, Precision, SolverOptions

logger = logging.getLogger(app_settings.LOGGER_NAME)


def _json_number(value):
    value = float(value)
    if np.isfinite(value):
        return value
    return 'inf' if value > 0 else ('-inf' if value < 0 else 'nan')


def result_document(result):
    """Return the JSON-ready document of a `SolveResult`."""
    kkt = result.kkt
    document = {
        'status': result.status.value,
        'objective': _json_number(result.objective),
        'dual_objective': _json_number(result.dual_objective),
        'iterations': result.iterations,
        'restarts': result.restarts,
        'polish_iterations': result.polish_iterations,
        'polish_incomplete': result.polish_incomplete,
        'solve_time_sec': result.solve_time_sec,
        'kkt': {
            'primal_residual': _json_number(kkt.primal_residual),
            'dual_residual': _json_number(kkt.dual_residual),
            'primal_objective': _json_number(kkt.primal_objective),
            'dual_objective': _json_number(kkt.dual_objective),
            'abs_gap': _json_number(kkt.abs_gap),
            'rel_gap': _json_number(kkt.rel_gap),
        },
        'x': [_json_number(value) for value in result.primal_solution],
        'y': [_json_number(value) for value in result.dual_solution],
    }
    if result.objective_before_polish is not None:
        document['objective_before_polish'] = _json_number(result.objective_before_polish)
    if result.certificate is not None:
        document['certificate'] = {
            'ray': [_json_number(value) for value in result.certificate.ray],
            'ray_objective': _json_number(result.certificate.ray_objective),
            'violation': _json_number(result.certificate.violation),
        }
    return document


def format_result(result):
    """Return a `SolveResult` as an indented JSON string."""
    return json.dumps(result_document(result), indent=4, sort_keys=True, separators=(',', ': '))


def read_vector(path):
    """Read a vector stored as a JSON list or as comma/newline separated numbers.

    @raise ValueError: If the file does not hold a flat list of numbers.
    """
    with open(path) as source:
        text = source.read().strip()
    if text.startswith('['):
        values = json.loads(text)
    else:
        values = [token for line in text.splitlines() for token in line.replace(',', ' ').split()]
    try:
        return np.array([float(value) for value in values], dtype=float)
    except (TypeError, ValueError):
        raise ValueError("'{}' does not contain a list of numbers.".format(path))


def _is_header(row):
    try:
        [float(value) for value in row]
    except ValueError:
        return True
    return False


def read_cost_rows(path):
    """Read a CSV file with one cost vector per row; a header row is optional.

    @raise ValueError: On ragged rows or non-numeric entries.
    @returntype: numpy.ndarray of shape (rows, n)
    """
    with open(path, newline='') as source:
        rows = [row for row in csv.reader(source) if row and any(cell.strip() for cell in row)]
    if rows and _is_header(rows[0]):
        rows = rows[1:]
    if not rows:
        raise ValueError("'{}' contains no cost vectors.".format(path))
    width = len(rows[0])
    for number, row in enumerate(rows, start=1):
        if len(row) != width:
            raise ValueError("'{}' row {} has {} entries, expected {}.".format(path, number, len(row), width))
        if _is_header(row):
            raise ValueError("'{}' row {} is not numeric.".format(path, number))
    return np.array(rows, dtype=float)


def add_solver_arguments(parser):
    """Add one flag per solver option; defaults are the `SolverOptions` defaults."""
    defaults = SolverOptions.defaults()
    parser.add_argument(
        '--algorithm', choices=[algorithm.value for algorithm in Algorithm], default=defaults['algorithm'].value,
        help="PDHG variant. By default %(default)s.")
    for name in ('eps_abs', 'eps_rel', 'eps_primal_infeasible', 'eps_dual_infeasible', 'eps_feas_polish'):
        parser.add_argument(
            '--' + name.replace('_', '-'), type=float, default=defaults[name],
            help="By default %(default)s.")
    parser.add_argument(
        '--iteration-limit', type=int, default=defaults['iteration_limit'],
        help="Maximum number of PDHG steps. By default %(default)s.")
    parser.add_argument(
        '--check-frequency', type=int, default=defaults['check_frequency'],
        help="Steps between termination checks. By default %(default)s.")
    parser.add_argument(
        '--display-frequency', type=int, default=defaults['display_frequency'],
        help="Checks between progress lines. By default %(default)s.")
    parser.add_argument(
        '--verbose', action='store_true', default=defaults['verbose'],
        help="Log solver progress to stderr.")
    parser.add_argument(
        '--feasibility-polishing', action='store_true', default=defaults['feasibility_polishing'],
        help="Polish the solution towards feasibility.")
    parser.add_argument(
        '--debug', action='store_true', default=defaults['debug'],
        help="Log restarts, primal weight updates and step rejections.")
    parser.add_argument(
        '--precision', choices=[precision.value for precision in Precision], default=defaults['precision'].value,
        help="Floating point precision of the iterations. By default %(default)s.")


def solver_options(options, **overrides):
    """Build `SolverOptions` from parsed command options."""
    values = {name: options[name] for name in SolverOptions.defaults() if name in options}
    values.update(overrides)
    return SolverOptions(**values)


def import_from_dotted_path(name):
    module_name, function_name = name.rsplit('.', 1)
    return getattr(import_module(module_name), function_name)


_result_handlers = None


def get_result_handlers():
    """ Returns the actual functions from the dotted paths specified in RESULT_HANDLERS. """
    global _result_handlers
    if not isinstance(_result_handlers, list):
        handlers = []
        for name in app_settings.RESULT_HANDLERS:
            function = import_from_dotted_path(name)
            handlers.append(function)
        _result_handlers = handlers
    return _result_handlers


def run_result_handlers(problem, result):
    for handler in get_result_handlers():
        handler(problem, result)
