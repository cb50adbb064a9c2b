"""Command to evaluate the normalized regret of predicted costs."""
import csv
import io

from pdhglp.diffopt import regret_report
from pdhglp.formats import FORMATS, read_problem
from pdhglp.management.base import PdhgCommand
from pdhglp.utils import add_solver_arguments, read_cost_rows, solver_options

HEADER = ('instance', 'numerator', 'denominator', 'regret')


def _number(value):
    return repr(float(value))


class Command(PdhgCommand):
    help = "Print per-instance and normalized regret of predicted cost vectors as CSV."

    def add_arguments(self, parser):
        """Parse command arguments."""
        parser.add_argument(
            '--input', required=True,
            help="The problem file defining the feasible set.")
        parser.add_argument(
            '--format', choices=FORMATS,
            help="Format of the problem file. By default guessed from its extension.")
        parser.add_argument(
            '--pred', required=True,
            help="CSV file of predicted cost vectors, one per row.")
        parser.add_argument(
            '--true', required=True,
            help="CSV file of true cost vectors, one per row.")
        parser.add_argument(
            '--output',
            help="Where to write the CSV. By default stdout.")
        add_solver_arguments(parser)

    def handle(self, **options):
        with self.command_errors():
            problem = read_problem(options['input'], options['format'])
            pred = read_cost_rows(options['pred'])
            true = read_cost_rows(options['true'])
            solver = solver_options(options)
        with self.logging_to_stderr(solver.verbose, solver.debug), self.command_errors():
            report = regret_report(pred, true, problem, solver)

        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator='\n')
        writer.writerow(HEADER)
        for index, values in enumerate(zip(report.numerators, report.denominators, report.regrets)):
            writer.writerow([index] + [_number(value) for value in values])
        writer.writerow(['total', _number(report.numerators.sum()), _number(report.denominators.sum()),
                         _number(report.normalized_regret)])
        self.write_output(buffer.getvalue(), options['output'])
