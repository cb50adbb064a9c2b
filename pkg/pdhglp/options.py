"""Solver options. The dataclass defaults are the only place solver defaults are defined."""
import sys
from dataclasses import dataclass, fields
from enum import Enum

import numpy as np

from pdhglp.exceptions import ProblemParameterError

MAX_ITERATIONS = sys.maxsize


class Algorithm(str, Enum):
    RAPDHG = "rapdhg"
    R2HPDHG = "r2hpdhg"


class Precision(str, Enum):
    F64 = "f64"
    F32 = "f32"

    @property
    def dtype(self):
        return np.float32 if self is Precision.F32 else np.float64


@dataclass(frozen=True)
class SolverOptions:
    """Options of `pdhglp.driver.solve`.

    @ivar check_frequency: Accepted steps between termination, restart and infeasibility checks.
    @ivar display_frequency: Checks between two verbose progress lines.
    @ivar warm_start: Whether warm start vectors passed to ``solve`` are used.
    @ivar debug: Also log restarts, primal weight updates and step rejections at DEBUG level.
    """

    eps_abs: float = 1e-4
    eps_rel: float = 1e-4
    eps_primal_infeasible: float = 1e-8
    eps_dual_infeasible: float = 1e-8
    eps_feas_polish: float = 1e-6
    iteration_limit: int = MAX_ITERATIONS
    check_frequency: int = 64
    verbose: bool = False
    display_frequency: int = 10
    warm_start: bool = False
    feasibility_polishing: bool = False
    algorithm: Algorithm = Algorithm.R2HPDHG
    precision: Precision = Precision.F64
    debug: bool = False

    def __post_init__(self):
        object.__setattr__(self, 'algorithm', Algorithm(self.algorithm))
        object.__setattr__(self, 'precision', Precision(self.precision))
        for name in ('eps_abs', 'eps_rel', 'eps_primal_infeasible', 'eps_dual_infeasible', 'eps_feas_polish'):
            if not getattr(self, name) > 0:
                raise ProblemParameterError("{} must be positive, got {}".format(name, getattr(self, name)))
        for name in ('iteration_limit', 'check_frequency', 'display_frequency'):
            if getattr(self, name) < 1:
                raise ProblemParameterError("{} must be at least 1, got {}".format(name, getattr(self, name)))

    @classmethod
    def defaults(cls):
        """Return ``{field name: default}`` for every option."""
        return {field.name: field.default for field in fields(cls)}
