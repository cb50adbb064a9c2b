"""Solve outcomes: status, KKT residuals, infeasibility certificates and the result record."""
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np


class Status(str, Enum):
    OPTIMAL = "Optimal"
    PRIMAL_INFEASIBLE = "PrimalInfeasible"
    DUAL_INFEASIBLE = "DualInfeasible"
    ITERATION_LIMIT = "IterationLimit"

    @property
    def is_infeasible(self):
        return self in (Status.PRIMAL_INFEASIBLE, Status.DUAL_INFEASIBLE)


@dataclass(frozen=True)
class KktResiduals:
    """Optimality measures of a primal-dual pair, in original-space units."""

    primal_residual: float
    dual_residual: float
    primal_objective: float
    dual_objective: float

    @property
    def abs_gap(self):
        return abs(self.primal_objective - self.dual_objective)

    @property
    def rel_gap(self):
        return self.abs_gap / (1 + abs(self.primal_objective) + abs(self.dual_objective))

    @property
    def norm(self):
        """Euclidean norm of the (primal residual, dual residual, gap) triple."""
        return float(np.sqrt(self.primal_residual ** 2 + self.dual_residual ** 2 + self.abs_gap ** 2))


@dataclass(frozen=True, eq=False)
class InfeasibilityCertificate:
    """A unit ray proving infeasibility.

    A dual ray (``status`` primal infeasible) has positive ``ray_objective``; a primal ray
    (``status`` dual infeasible) has negative ``ray_objective``. ``violation`` is the largest
    amount by which the ray misses the exact certificate conditions.
    """

    status: Status
    ray: np.ndarray
    ray_objective: float
    violation: float


@dataclass(eq=False)
class SolveResult:
    status: Status
    primal_solution: np.ndarray
    dual_solution: np.ndarray
    reduced_costs: np.ndarray
    objective: float
    dual_objective: float
    kkt: KktResiduals
    iterations: int
    restarts: int
    polish_iterations: int = 0
    solve_time_sec: float = 0.0
    certificate: Optional[InfeasibilityCertificate] = None
    polish_incomplete: bool = False
    objective_before_polish: Optional[float] = None

    @property
    def x(self):
        return self.primal_solution

    @property
    def y(self):
        return self.dual_solution

    def __repr__(self):
        return "SolveResult(status={}, objective={!r}, iterations={}, restarts={})".format(
            self.status.value, self.objective, self.iterations, self.restarts)
