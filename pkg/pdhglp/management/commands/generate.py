"""Command to generate benchmark LPs."""
from pdhglp.formats import FORMATS, MPS, dump_problem, guess_format
from pdhglp.management.base import PdhgCommand
from pdhglp.problem import DEFAULT_KNAPSACK_CAPACITY, gen_grid_costs, gen_grid_shortest_path, gen_knapsack
from pdhglp.utils import read_cost_rows, read_vector

GRID = 'grid'
KNAPSACK = 'knapsack'
DEFAULT_GRID_SIDE = 12
DEFAULT_ITEMS = 100
DEFAULT_DIMS = 10


class Command(PdhgCommand):
    help = "Generate a grid shortest path or knapsack LP."

    def add_arguments(self, parser):
        """Parse command arguments."""
        parser.add_argument(
            'family', choices=(GRID, KNAPSACK),
            help="The instance family.")
        parser.add_argument(
            '--output',
            help="Where to write the problem. By default stdout.")
        parser.add_argument(
            '--format', choices=FORMATS,
            help="Output format. By default guessed from --output, otherwise %s." % MPS)
        parser.add_argument(
            '--seed', type=int,
            help="Seed of the random parts of the instance.")
        parser.add_argument(
            '--k', type=int, default=DEFAULT_GRID_SIDE,
            help="Grid side. By default %(default)s.")
        parser.add_argument(
            '--costs',
            help="CSV file with the k x k vertex costs. By default seeded uniform costs.")
        parser.add_argument(
            '--items', type=int, default=DEFAULT_ITEMS,
            help="Number of knapsack items. By default %(default)s.")
        parser.add_argument(
            '--dims', type=int, default=DEFAULT_DIMS,
            help="Number of knapsack dimensions. By default %(default)s.")
        parser.add_argument(
            '--capacity', type=float, default=DEFAULT_KNAPSACK_CAPACITY,
            help="Knapsack capacity. By default %(default)s.")
        parser.add_argument(
            '--values',
            help="File with the item values. By default seeded uniform values.")

    def handle(self, **options):
        with self.command_errors():
            if options['family'] == GRID:
                k = options['k']
                costs = read_cost_rows(options['costs']) if options['costs'] else gen_grid_costs(k, options['seed'])
                problem = gen_grid_shortest_path(k, costs)
            else:
                values = read_vector(options['values']) if options['values'] else None
                problem = gen_knapsack(options['items'], options['dims'], capacity=options['capacity'],
                                       values=values, seed=options['seed'])
            format = options['format'] or (guess_format(options['output']) if options['output'] else MPS)
            text = dump_problem(problem, format)
        self.write_output(text, options['output'])
