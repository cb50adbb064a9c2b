"""Human readable summary of a solve."""
from django.template.loader import get_template


class SolveSummary:
    """Summary of one solve.

    @ivar name: Problem name
    @ivar n: Number of variables
    @ivar num_inequalities: Number of inequality rows
    @ivar num_equalities: Number of equality rows
    @ivar algorithm: Name of the algorithm used

    @ivar result: The solve result
    @type result: SolveResult
    """

    def __init__(self, problem, result, algorithm):
        self.name = problem.name or 'unnamed problem'
        self.n = problem.n
        self.num_inequalities = problem.num_inequalities
        self.num_equalities = problem.num_equalities
        self.algorithm = algorithm
        self.result = result
        self.kkt = result.kkt
        self.objective_change = None
        if result.objective_before_polish is not None:
            self.objective_change = result.objective - result.objective_before_polish

    def render(self):
        """Render the summary."""
        template = get_template('pdhglp/summary.txt')
        return template.render(self.__dict__)
