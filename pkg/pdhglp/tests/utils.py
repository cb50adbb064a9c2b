"""Test utilities: small problems with known solutions and reference solvers."""
import numpy as np
from scipy.optimize import linprog
from scipy.sparse.csgraph import csgraph_from_dense, dijkstra

from pdhglp.linalg import Storage
from pdhglp.problem import LpProblem, grid_edges


def tiny_lp(storage=Storage.SPARSE_CSR):
    """``min 2 x1 + x2 s.t. x1 + x2 >= 1, 0 <= x <= 1``; optimum ``x = (0, 1)`` with value 1."""
    return LpProblem(c=[2.0, 1.0], G=[[1.0, 1.0]], h=[1.0], l=[0.0, 0.0], u=[1.0, 1.0], storage=storage,
                     name='tiny')


def equality_lp():
    """``min x1 + 2 x2 s.t. x1 + x2 = 2, x1 - x2 >= -1, x >= 0``; optimum ``x = (2, 0)`` with value 2."""
    return LpProblem(c=[1.0, 2.0], A=[[1.0, 1.0]], b=[2.0], G=[[1.0, -1.0]], h=[-1.0], name='equality')


def infeasible_lp():
    """``x >= 1`` and ``-x >= 0`` with ``x >= 0``."""
    return LpProblem(c=[0.0], G=[[1.0], [-1.0]], h=[1.0, 0.0], name='infeasible')


def unbounded_lp():
    """``min -x`` over ``x >= 0``."""
    return LpProblem(c=[-1.0], name='unbounded')


def linprog_oracle(problem):
    """Solve `problem` with HiGHS; return ``(objective, x)``."""
    bounds = [(None if np.isinf(lower) else lower, None if np.isinf(upper) else upper)
              for lower, upper in zip(problem.l, problem.u)]
    kwargs = {}
    if problem.num_inequalities:
        kwargs.update(A_ub=-problem.G.to_dense(), b_ub=-problem.h)
    if problem.num_equalities:
        kwargs.update(A_eq=problem.A.to_dense(), b_eq=problem.b)
    outcome = linprog(problem.c, bounds=bounds, method='highs', **kwargs)
    assert outcome.status == 0, outcome.message
    return outcome.fun + problem.objective_offset, outcome.x


def vertex_oracle(problem):
    """Solve `problem` with the dual simplex, which ends at a vertex; return ``x``."""
    bounds = list(zip(problem.l, problem.u))
    outcome = linprog(problem.c, A_ub=-problem.G.to_dense(), b_ub=-problem.h, bounds=bounds, method='highs-ds')
    assert outcome.status == 0, outcome.message
    return outcome.x


def dijkstra_oracle(k, vertex_costs):
    """Shortest path cost from the top left to the bottom right vertex of the cost grid."""
    costs = np.asarray(vertex_costs, dtype=float).ravel()
    weights = np.full((k * k, k * k), np.inf)
    for tail, head in grid_edges(k):
        weights[tail, head] = costs[head]
    # Zero costs are real edges; only inf marks a missing one.
    graph = csgraph_from_dense(weights, null_value=np.inf)
    return dijkstra(graph, directed=True, indices=0)[k * k - 1]
