"""The PDHG iteration kernel: projections, steps, Halpern reflection, averaging and step sizes."""
import logging
from collections import namedtuple
from dataclasses import dataclass

import numpy as np

from pdhglp.conf import app_settings

logger = logging.getLogger(app_settings.LOGGER_NAME)

SHRINK_EXPONENT = -0.3
GROWTH_EXPONENT = -0.6
MAX_STEP_ATTEMPTS = 50

Iterate = namedtuple("Iterate", ["x", "y"])


@dataclass
class IterateAverage:
    """Weighted running mean of the iterates of one restart epoch.

    @ivar weight: Sum of the weights folded in so far; zero for an empty average.
    """

    x: np.ndarray
    y: np.ndarray
    weight: float = 0.0

    @classmethod
    def empty(cls, n, m, dtype=np.float64):
        return cls(np.zeros(n, dtype=dtype), np.zeros(m, dtype=dtype), 0.0)

    @property
    def iterate(self):
        return Iterate(self.x, self.y)


@dataclass
class StepState:
    """Step-size scale and primal weight of one solve.

    ``tau = eta / omega`` and ``sigma = eta * omega`` are derived, so ``tau * sigma = eta**2``
    and ``tau / sigma = omega**-2`` always hold.

    @ivar step_count: Accepted steps so far.
    @ivar rejections: Rejected step attempts so far.
    """

    eta: float
    omega: float
    step_count: int = 0
    rejections: int = 0

    @property
    def tau(self):
        return self.eta / self.omega

    @property
    def sigma(self):
        return self.eta * self.omega


def project_box(x, l, u):
    return np.minimum(np.maximum(x, l), u)


def project_dual_cone(y, m1):
    """Clamp the first `m1` (inequality) duals at zero; equality duals are free."""
    projected = np.array(y, copy=True)
    projected[:m1] = np.maximum(projected[:m1], 0)
    return projected


def pdhg_step(z, sf, tau, sigma):
    """One PDHG step on the saddle form `sf` with one ``K^T`` and one ``K`` product."""
    x_next = project_box(z.x - tau * (sf.c - sf.K.rmatvec(z.y)), sf.l, sf.u)
    y_next = project_dual_cone(z.y + sigma * (sf.q - sf.K.matvec(2 * x_next - z.x)), sf.num_inequalities)
    return Iterate(x_next, y_next)


def halpern_reflect_update(z_k, pdhg_of_zk, z0, k):
    """Average the reflected step ``2 * PDHG(z_k) - z_k`` with the anchor `z0`.

    Weights are ``(k + 1) / (k + 2)`` and ``1 / (k + 2)``; at ``k = 0`` the result is the plain
    PDHG step.
    """
    reflected_weight = (k + 1) / (k + 2)
    anchor_weight = 1.0 / (k + 2)
    return Iterate(
        reflected_weight * (2 * pdhg_of_zk.x - z_k.x) + anchor_weight * z0.x,
        reflected_weight * (2 * pdhg_of_zk.y - z_k.y) + anchor_weight * z0.y,
    )


def update_average(avg, z_new, step_weight):
    """Fold `z_new` with weight `step_weight` into the running mean `avg` (in place)."""
    weight = avg.weight + step_weight
    share = step_weight / weight
    avg.x = avg.x + share * (z_new.x - avg.x)
    avg.y = avg.y + share * (z_new.y - avg.y)
    avg.weight = weight
    return avg


def weighted_norm(dx, dy, omega):
    """``sqrt(omega * |dx|^2 + |dy|^2 / omega)``, the norm balancing the two spaces."""
    return float(np.sqrt(omega * (dx @ dx) + (dy @ dy) / omega))


def fixed_point_residual(z, pdhg_of_z, omega):
    return weighted_norm(pdhg_of_z.x - z.x, pdhg_of_z.y - z.y, omega)


def step_interaction(sf, z, z_candidate):
    """``|dy^T K dx|`` of the step from `z` to `z_candidate`."""
    dx = z_candidate.x - z.x
    dy = z_candidate.y - z.y
    return abs(float(dy @ sf.K.matvec(dx)))


def adaptive_step_update(state, z, z_candidate, interaction):
    """Decide whether the step to `z_candidate` taken with ``state.eta`` is acceptable.

    The step limit is ``(omega |dx|^2 + |dy|^2 / omega) / (2 * interaction)``, infinite when
    the interaction vanishes. The next step size shrinks towards the limit or grows by a
    factor decaying in the index ``k`` of the step being attempted.

    @return: ``(accept, new_eta)``
    """
    dx = z_candidate.x - z.x
    dy = z_candidate.y - z.y
    if interaction > 0:
        limit = (state.omega * float(dx @ dx) + float(dy @ dy) / state.omega) / (2 * interaction)
    else:
        limit = np.inf
    k = state.step_count + 1
    new_eta = min((1 - (k + 1) ** SHRINK_EXPONENT) * limit, (1 + (k + 1) ** GROWTH_EXPONENT) * state.eta)
    return state.eta <= limit, float(new_eta)


def adaptive_pdhg_step(z, sf, state, debug=False):
    """Take one accepted PDHG step from `z`, retrying with smaller step sizes on rejection.

    After `MAX_STEP_ATTEMPTS` attempts the last candidate is accepted.

    @return: ``(new iterate, eta the step was taken with)``
    """
    for attempt in range(1, MAX_STEP_ATTEMPTS + 1):
        step_eta = state.eta
        candidate = pdhg_step(z, sf, state.tau, state.sigma)
        accept, state.eta = adaptive_step_update(state, z, candidate, step_interaction(sf, z, candidate))
        if accept or attempt == MAX_STEP_ATTEMPTS:
            state.step_count += 1
            if debug and not accept:
                logger.debug("Accepted step %d with eta=%.6g above its limit after %d attempts",
                             state.step_count, step_eta, attempt)
            return candidate, step_eta
        state.rejections += 1
        if debug:
            logger.debug("Rejected step %d with eta=%.6g, retrying with eta=%.6g",
                         state.step_count + 1, step_eta, state.eta)


def update_primal_weight(omega, delta_x_norm, delta_y_norm, theta):
    """Smooth ``log(omega)`` towards ``log(delta_y_norm / delta_x_norm)``.

    The weight stays put when either movement is zero.
    """
    if delta_x_norm > 0 and delta_y_norm > 0:
        return float(np.exp(theta * np.log(delta_y_norm / delta_x_norm) + (1 - theta) * np.log(omega)))
    return omega
