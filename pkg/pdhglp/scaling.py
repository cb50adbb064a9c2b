"""Diagonal preconditioning of the saddle form and the matching solution transforms.

A scaling ``(D_r, D_c)`` turns ``K`` into ``D_r K D_c`` and the data into ``D_c c``, ``D_r q``
and ``D_c^-1 l``, ``D_c^-1 u``. Solutions of the scaled problem map back by ``x = D_c x~`` and
``y = D_r y~``.
"""
import logging
from dataclasses import dataclass

import numpy as np

from pdhglp.conf import app_settings
from pdhglp.exceptions import DimensionError, ProblemParameterError
from pdhglp.linalg import abs_power_sums, row_col_inf_norms
from pdhglp.problem import SaddleForm

logger = logging.getLogger(app_settings.LOGGER_NAME)

FROM_SETTINGS = object()


@dataclass(frozen=True, eq=False)
class ScalingInfo:
    """Accumulated positive row and column scales."""

    row_scale: np.ndarray
    col_scale: np.ndarray

    @classmethod
    def identity(cls, m, n):
        return cls(np.ones(m), np.ones(n))

    def then(self, other):
        """Compose with a scaling applied after this one."""
        return ScalingInfo(self.row_scale * other.row_scale, self.col_scale * other.col_scale)


def _inverse_sqrt(norms):
    """``1 / sqrt(norm)``, with unit factors for zero rows and columns."""
    factors = np.ones_like(norms)
    nonzero = norms > 0
    factors[nonzero] = 1.0 / np.sqrt(norms[nonzero])
    return factors


def ruiz_scale(K, iters):
    """Equilibrate the infinity norms of rows and columns of `K`.

    Each pass divides every row and every column by the square root of its current infinity
    norm. Both norms are taken from the matrix at the start of the pass.

    @return: ``(scaled matrix, ScalingInfo)``
    """
    if iters < 1:
        raise ProblemParameterError("Ruiz scaling needs at least one iteration, got {}".format(iters))
    info = ScalingInfo.identity(K.nrows, K.ncols)
    for _ in range(iters):
        row_norms, col_norms = row_col_inf_norms(K)
        step = ScalingInfo(_inverse_sqrt(row_norms), _inverse_sqrt(col_norms))
        K = K.scale(step.row_scale, step.col_scale)
        info = info.then(step)
    return K, info


def pock_chambolle_scale(K, alpha=1.0):
    """One pass of Pock-Chambolle diagonal scaling.

    Row ``i`` is divided by ``sqrt(sum_j |K_ij|**(2 - alpha))`` and column ``j`` by
    ``sqrt(sum_i |K_ij|**alpha)``.
    """
    if not 0 <= alpha <= 2:
        raise ProblemParameterError("Pock-Chambolle alpha must lie in [0, 2], got {}".format(alpha))
    row_sums, _ = abs_power_sums(K, 2.0 - alpha)
    _, col_sums = abs_power_sums(K, alpha)
    info = ScalingInfo(_inverse_sqrt(row_sums), _inverse_sqrt(col_sums))
    return K.scale(info.row_scale, info.col_scale), info


def _check_dimensions(sf, info):
    if info.row_scale.shape != (sf.m,) or info.col_scale.shape != (sf.n,):
        raise DimensionError("scaling of sizes ({}, {}) does not fit a problem with {} rows and {} columns".format(
            info.row_scale.shape[0], info.col_scale.shape[0], sf.m, sf.n))


def apply_scaling(sf, info):
    """Return the saddle form `sf` scaled by `info`; the matrix is scaled as well."""
    _check_dimensions(sf, info)
    return scale_data(sf, sf.K.scale(info.row_scale, info.col_scale), info)


def scale_data(sf, K, info):
    """Scale the vectors of `sf` by `info` and pair them with the already scaled matrix `K`."""
    _check_dimensions(sf, info)
    return SaddleForm(
        K=K,
        q=sf.q * info.row_scale,
        num_inequalities=sf.num_inequalities,
        l=sf.l / info.col_scale,
        u=sf.u / info.col_scale,
        c=sf.c * info.col_scale,
    )


def unscale_solution(x, y, info):
    """Map a solution of the scaled problem back to the original problem."""
    return np.asarray(x) * info.col_scale, np.asarray(y) * info.row_scale


def scale_solution(x, y, info):
    """Map an original-space point into the scaled problem."""
    return np.asarray(x) / info.col_scale, np.asarray(y) / info.row_scale


def precondition(sf, ruiz_iterations=FROM_SETTINGS, pock_chambolle_alpha=FROM_SETTINGS):
    """Ruiz equilibration followed by one Pock-Chambolle pass.

    Defaults come from ``PDHGLP_RUIZ_ITERATIONS`` and ``PDHGLP_POCK_CHAMBOLLE_ALPHA``. Zero Ruiz
    iterations or an alpha of ``None`` skip the respective pass.

    @return: ``(scaled SaddleForm, ScalingInfo)``
    """
    if ruiz_iterations is FROM_SETTINGS:
        ruiz_iterations = app_settings.RUIZ_ITERATIONS
    if pock_chambolle_alpha is FROM_SETTINGS:
        pock_chambolle_alpha = app_settings.POCK_CHAMBOLLE_ALPHA

    K = sf.K
    info = ScalingInfo.identity(sf.m, sf.n)
    if ruiz_iterations:
        K, ruiz = ruiz_scale(K, ruiz_iterations)
        info = info.then(ruiz)
    if pock_chambolle_alpha is not None:
        K, pock_chambolle = pock_chambolle_scale(K, pock_chambolle_alpha)
        info = info.then(pock_chambolle)
    logger.debug("Preconditioned %dx%d matrix: row scales in [%g, %g], column scales in [%g, %g]",
                 sf.m, sf.n, *_range(info.row_scale), *_range(info.col_scale))
    return scale_data(sf, K, info), info


def _range(values):
    if values.size == 0:
        return 1.0, 1.0
    return values.min(), values.max()
