"""Decision-focused learning on top of `batch_solve`: the SPO+ loss, its subgradient and regret.

All costs are costs of the minimization form of the feasible set, e.g. negated item values for
knapsack instances built by `pdhglp.problem.gen_knapsack`.
"""
import logging
from collections import namedtuple
from dataclasses import dataclass, replace

import numpy as np

from pdhglp.conf import app_settings
from pdhglp.driver import batch_solve
from pdhglp.exceptions import DimensionError, InnerSolveError, ProblemParameterError, UndefinedMetricError
from pdhglp.options import SolverOptions
from pdhglp.results import Status

logger = logging.getLogger(app_settings.LOGGER_NAME)

OBJECTIVE_CONSISTENCY = 1e-9

RegretReport = namedtuple("RegretReport", ["numerators", "denominators", "regrets", "normalized_regret"])


def _cost_matrix(costs, n, what):
    costs = np.atleast_2d(np.asarray(costs, dtype=float))
    if costs.ndim != 2 or costs.shape[1] != n:
        raise DimensionError("{} must have {} entries per member, got shape {}".format(what, n, costs.shape))
    return costs


def _solve_all(costs, feasible_set, options, warm_starts=None):
    """Solve `feasible_set` once per cost vector; every solve has to end optimal."""
    problems = [feasible_set.with_objective(cost) for cost in costs]
    results = batch_solve(problems, options, warm_starts)
    for index, result in enumerate(results):
        if result.status is not Status.OPTIMAL:
            raise InnerSolveError(index, result.status.value)
    return results


@dataclass(frozen=True, eq=False)
class SpoBatch:
    """Predicted costs together with the true costs and their optimal solutions and objectives."""

    pred_costs: np.ndarray
    true_costs: np.ndarray
    true_sols: np.ndarray
    true_objs: np.ndarray

    def __post_init__(self):
        values = {name: np.atleast_2d(np.asarray(getattr(self, name), dtype=float))
                  for name in ('pred_costs', 'true_costs', 'true_sols')}
        values['true_objs'] = np.asarray(self.true_objs, dtype=float).ravel()
        shapes = {values[name].shape for name in ('pred_costs', 'true_costs', 'true_sols')}
        if len(shapes) != 1:
            raise DimensionError("batch members must share their length, got shapes {}".format(sorted(shapes)))
        if values['true_objs'].shape != (values['true_costs'].shape[0],):
            raise DimensionError("need one true objective per batch member")
        expected = np.einsum('ij,ij->i', values['true_costs'], values['true_sols'])
        for index, (objective, check) in enumerate(zip(values['true_objs'], expected)):
            if abs(objective - check) > OBJECTIVE_CONSISTENCY * max(1.0, abs(check)):
                raise ProblemParameterError("batch member {}: true objective {} does not match c^T x = {}".format(
                    index, objective, check))
        for name, value in values.items():
            object.__setattr__(self, name, value)

    @classmethod
    def solve(cls, pred_costs, true_costs, feasible_set, options=None):
        """Build a batch, solving the true problems with `batch_solve`."""
        true_costs = _cost_matrix(true_costs, feasible_set.n, "true costs")
        pred_costs = _cost_matrix(pred_costs, feasible_set.n, "predicted costs")
        results = _solve_all(true_costs, feasible_set, options)
        true_sols = np.array([result.primal_solution for result in results])
        return cls(pred_costs, true_costs, true_sols, np.einsum('ij,ij->i', true_costs, true_sols))

    def __len__(self):
        return self.true_costs.shape[0]


def spo_plus_loss(batch, feasible_set, options=None, warm_starts=None):
    """Mean SPO+ loss of `batch` over the feasible set.

    Each member contributes ``-min_x (2 c^ - c)^T x + 2 c^T^ x*(c) - c^T x*(c)``. The objective of
    `feasible_set` is replaced per member.

    @return: ``(loss, inner solutions x*(2 c^ - c))``
    @raise InnerSolveError: If an inner solve does not end optimal.
    """
    inner_costs = 2 * batch.pred_costs - batch.true_costs
    results = _solve_all(inner_costs, feasible_set, options, warm_starts)
    inner_sols = np.array([result.primal_solution for result in results])
    inner_objs = np.einsum('ij,ij->i', inner_costs, inner_sols)
    losses = -inner_objs + 2 * np.einsum('ij,ij->i', batch.pred_costs, batch.true_sols) - batch.true_objs
    return float(losses.mean()), inner_sols


def spo_plus_subgradient(true_sols, inner_sols, reduction='mean'):
    """Subgradient ``2 x*(c) - 2 x*(2 c^ - c)`` per member.

    With ``reduction='mean'`` each member's gradient is divided by the batch size, matching the
    mean loss of `spo_plus_loss`; ``'none'`` returns the per-member gradients.
    """
    true_sols = np.atleast_2d(np.asarray(true_sols, dtype=float))
    inner_sols = np.atleast_2d(np.asarray(inner_sols, dtype=float))
    if true_sols.shape != inner_sols.shape:
        raise DimensionError("solution batches differ in shape: {} and {}".format(true_sols.shape, inner_sols.shape))
    gradients = 2 * (true_sols - inner_sols)
    if reduction == 'mean':
        return gradients / true_sols.shape[0]
    if reduction == 'none':
        return gradients
    raise ValueError("unknown reduction {!r}".format(reduction))


def regret_report(pred_costs, true_costs, feasible_set, options=None):
    """Per-member regret ``c^T (x*(c^) - x*(c))`` and optimal objective magnitudes ``|c^T x*(c)|``.

    @returntype: RegretReport
    @raise UndefinedMetricError: If the optimal objectives are all zero.
    """
    true_costs = _cost_matrix(true_costs, feasible_set.n, "true costs")
    pred_costs = _cost_matrix(pred_costs, feasible_set.n, "predicted costs")
    if pred_costs.shape != true_costs.shape:
        raise DimensionError("got {} predicted and {} true cost vectors".format(pred_costs.shape[0], true_costs.shape[0]))
    results = _solve_all(np.vstack([pred_costs, true_costs]), feasible_set, options)
    count = true_costs.shape[0]
    pred_sols = np.array([result.primal_solution for result in results[:count]])
    true_sols = np.array([result.primal_solution for result in results[count:]])

    numerators = np.einsum('ij,ij->i', true_costs, pred_sols - true_sols)
    denominators = np.abs(np.einsum('ij,ij->i', true_costs, true_sols))
    total = denominators.sum()
    if total == 0:
        raise UndefinedMetricError("normalized regret is undefined: all optimal objectives are zero")
    with np.errstate(divide='ignore', invalid='ignore'):
        regrets = np.where(denominators > 0, numerators / np.where(denominators > 0, denominators, 1.0), np.nan)
    return RegretReport(numerators, denominators, regrets, float(numerators.sum() / total))


def normalized_regret(pred_costs, true_costs, feasible_set, options=None):
    """``sum_i c_i^T (x*(c^_i) - x*(c_i)) / sum_i |c_i^T x*(c_i)|``."""
    return regret_report(pred_costs, true_costs, feasible_set, options).normalized_regret


class SpoPlus:
    """SPO+ loss and subgradient that warm-starts inner solves from the previous evaluation.

    Inner solutions are remembered per sample key, so repeated passes over a dataset start
    each inner solve from the solution of the previous pass.
    """

    def __init__(self, feasible_set, options=None):
        self.feasible_set = feasible_set
        self.options = replace(options or SolverOptions(), warm_start=True)
        self._previous = {}

    def __call__(self, batch, keys=None):
        """Return ``(mean loss, mean-reduced subgradient)`` of `batch`."""
        keys = list(range(len(batch))) if keys is None else list(keys)
        if len(keys) != len(batch):
            raise DimensionError("got {} keys for {} batch members".format(len(keys), len(batch)))
        warm_starts = [self._previous.get(key) for key in keys]
        inner_costs = 2 * batch.pred_costs - batch.true_costs
        results = _solve_all(inner_costs, self.feasible_set, self.options, warm_starts)
        inner_sols = np.array([result.primal_solution for result in results])
        for key, result in zip(keys, results):
            self._previous[key] = (result.primal_solution, result.dual_solution)
        inner_objs = np.einsum('ij,ij->i', inner_costs, inner_sols)
        losses = -inner_objs + 2 * np.einsum('ij,ij->i', batch.pred_costs, batch.true_sols) - batch.true_objs
        logger.debug("SPO+ batch of %d: %d inner iterations", len(batch), sum(r.iterations for r in results))
        return float(losses.mean()), spo_plus_subgradient(batch.true_sols, inner_sols)

    def reset(self):
        self._previous.clear()


def gen_knapsack_dataset(num_data, num_features, n_items, deg=1, noise_width=0.0, seed=None):
    """Features and item values of the polynomial knapsack benchmark.

    Features are standard normal; item values are
    ``((B f) / sqrt(num_features) + 3) ** deg + 1`` times multiplicative noise drawn uniformly
    from ``[1 - noise_width, 1 + noise_width]``, with a fixed Bernoulli(0.5) matrix ``B``.

    @return: ``(features, values)`` of shapes ``(num_data, num_features)`` and
        ``(num_data, n_items)``. Values are maximization values; negate them for costs.
    """
    if num_data < 1 or num_features < 1 or n_items < 1:
        raise ProblemParameterError("dataset sizes must be positive")
    if deg < 1:
        raise ProblemParameterError("polynomial degree must be at least 1, got {}".format(deg))
    if not 0 <= noise_width < 1:
        raise ProblemParameterError("noise width must lie in [0, 1), got {}".format(noise_width))
    rng = np.random.default_rng(seed)
    B = rng.binomial(1, 0.5, size=(n_items, num_features))
    features = rng.standard_normal((num_data, num_features))
    values = ((features @ B.T) / np.sqrt(num_features) + 3) ** deg + 1
    values *= rng.uniform(1 - noise_width, 1 + noise_width, size=values.shape)
    return features, values
