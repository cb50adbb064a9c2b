"""Command to solve an LP file."""
from django.core.management.base import CommandError

from pdhglp.driver import solve
from pdhglp.formats import FORMATS, read_problem
from pdhglp.management.base import PdhgCommand, status_exit_code
from pdhglp.summary import SolveSummary
from pdhglp.utils import add_solver_arguments, format_result, read_vector, solver_options


class Command(PdhgCommand):
    help = "Solve an LP given as MPS or JSON and print the result as JSON."

    def add_arguments(self, parser):
        """Parse command arguments."""
        parser.add_argument(
            '--input', required=True,
            help="The problem file.")
        parser.add_argument(
            '--output',
            help="Where to write the JSON result. By default stdout.")
        parser.add_argument(
            '--format', choices=FORMATS,
            help="Format of the problem file. By default guessed from its extension.")
        parser.add_argument(
            '--warm-start-primal',
            help="File with the initial primal vector.")
        parser.add_argument(
            '--warm-start-dual',
            help="File with the initial dual vector.")
        add_solver_arguments(parser)

    def handle(self, **options):
        with self.command_errors():
            problem = read_problem(options['input'], options['format'])
            warm = [read_vector(options[name]) if options[name] else None
                    for name in ('warm_start_primal', 'warm_start_dual')]
            solver = solver_options(options, warm_start=any(vector is not None for vector in warm))

        with self.logging_to_stderr(solver.verbose, solver.debug), self.command_errors():
            result = solve(problem, solver, tuple(warm) if solver.warm_start else None)
            if solver.verbose:
                self.stderr.write(SolveSummary(problem, result, solver.algorithm.value).render())

        self.write_output(format_result(result), options['output'])
        code = status_exit_code(result.status)
        if code:
            raise CommandError("Solve ended with status {}.".format(result.status.value), returncode=code)
