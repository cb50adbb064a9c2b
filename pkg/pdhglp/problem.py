"""Linear programs, their saddle-point form and the benchmark instance generators.

Problems are stated as::

    minimize    c^T x + objective_offset
    subject to  A x  = b
                G x >= h
                l <= x <= u
"""
import logging
from dataclasses import dataclass, field, replace

import numpy as np
from django.core.exceptions import ValidationError

from pdhglp.conf import app_settings
from pdhglp.exceptions import ProblemParameterError
from pdhglp.linalg import ConstraintMatrix, Storage

logger = logging.getLogger(app_settings.LOGGER_NAME)

DEFAULT_KNAPSACK_CAPACITY = 500
KNAPSACK_WEIGHT_RANGE = (3, 8)

# Moves of the 8-connected grid, in the order the edge variables are numbered.
GRID_MOVES = (
    (-1, -1), (-1, 0), (-1, 1),
    (0, -1), (0, 1),
    (1, -1), (1, 0), (1, 1),
)


def _vector(value, length, fill):
    if value is None:
        return np.full(length, fill, dtype=float)
    return np.array(value, dtype=float).ravel()


def _matrix(value, ncols, storage):
    if value is None:
        return ConstraintMatrix.empty(ncols, storage)
    if isinstance(value, ConstraintMatrix):
        return value.as_storage(storage)
    return ConstraintMatrix(value, storage)


def _freeze(array):
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class LpProblem:
    """An LP in the form above.

    Missing parts default to an empty constraint block, ``l = 0`` and ``u = +inf``. The problem is
    immutable once constructed; use `with_objective` and friends to derive variants.

    @ivar storage: Storage of both constraint matrices (``Storage.SPARSE_CSR`` by default).
    """

    c: np.ndarray
    A: ConstraintMatrix = None
    b: np.ndarray = None
    G: ConstraintMatrix = None
    h: np.ndarray = None
    l: np.ndarray = None
    u: np.ndarray = None
    storage: Storage = Storage.SPARSE_CSR
    objective_offset: float = 0.0
    name: str = field(default="")

    def __post_init__(self):
        storage = Storage(self.storage)
        c = np.array(self.c, dtype=float).ravel()
        n = c.shape[0]
        A = _matrix(self.A, n, storage)
        G = _matrix(self.G, n, storage)
        values = {
            "storage": storage,
            "c": c,
            "A": A,
            "G": G,
            "b": _vector(self.b, A.nrows, 0.0),
            "h": _vector(self.h, G.nrows, 0.0),
            "l": _vector(self.l, n, 0.0),
            "u": _vector(self.u, n, np.inf),
            "objective_offset": float(self.objective_offset),
        }
        for name, value in values.items():
            if isinstance(value, np.ndarray):
                value = _freeze(value)
            object.__setattr__(self, name, value)

    @property
    def n(self):
        return self.c.shape[0]

    @property
    def num_inequalities(self):
        return self.G.nrows

    @property
    def num_equalities(self):
        return self.A.nrows

    @property
    def shape(self):
        """``(n, m1, m2)``: the dimensions batch members have to share."""
        return self.n, self.num_inequalities, self.num_equalities

    def with_objective(self, c):
        return replace(self, c=c)

    def without_objective(self):
        return replace(self, c=np.zeros(self.n), objective_offset=0.0)

    def without_rhs(self):
        return replace(self, b=np.zeros(self.num_equalities), h=np.zeros(self.num_inequalities))

    def objective_value(self, x):
        return float(self.c @ x) + self.objective_offset

    def __repr__(self):
        return "LpProblem(name={!r}, n={}, m1={}, m2={}, storage={})".format(
            self.name, self.n, self.num_inequalities, self.num_equalities, self.storage.value)


@dataclass(frozen=True, eq=False)
class SaddleForm:
    """The data of ``min_{x in X} max_{y in Y} c^T x - y^T K x + q^T y``.

    ``K`` stacks ``G`` over ``A`` and ``q`` stacks ``h`` over ``b``; the first ``num_inequalities``
    entries of ``y`` are sign-constrained (``y >= 0``), the rest are free.
    """

    K: ConstraintMatrix
    q: np.ndarray
    num_inequalities: int
    l: np.ndarray
    u: np.ndarray
    c: np.ndarray

    @property
    def n(self):
        return self.K.ncols

    @property
    def m(self):
        return self.K.nrows

    def split(self):
        """Return the ``(G, A)`` blocks of ``K``."""
        m1 = self.num_inequalities
        return self.K.row_slice(0, m1), self.K.row_slice(m1, self.m)

    def astype(self, dtype):
        return SaddleForm(
            self.K.astype(dtype), self.q.astype(dtype), self.num_inequalities,
            self.l.astype(dtype), self.u.astype(dtype), self.c.astype(dtype),
        )


def validate_problem(problem):
    """Return the complete list of problems with `problem`; an empty list means it is valid."""
    violations = []
    n = problem.n
    if problem.A.ncols != n:
        violations.append("equality matrix has {} columns, expected {}".format(problem.A.ncols, n))
    if problem.G.ncols != n:
        violations.append("inequality matrix has {} columns, expected {}".format(problem.G.ncols, n))
    if problem.b.shape[0] != problem.A.nrows:
        violations.append("rhs length mismatch: b has length {} but A has {} rows".format(
            problem.b.shape[0], problem.A.nrows))
    if problem.h.shape[0] != problem.G.nrows:
        violations.append("inequality rhs length mismatch: h has length {} but G has {} rows".format(
            problem.h.shape[0], problem.G.nrows))
    for name in ("l", "u"):
        length = getattr(problem, name).shape[0]
        if length != n:
            violations.append("bound length mismatch: {} has length {}, expected {}".format(name, length, n))

    for name in ("c", "b", "h", "l", "u"):
        values = getattr(problem, name)
        if np.isnan(values).any():
            violations.append("NaN in {} at index {}".format(name, int(np.flatnonzero(np.isnan(values))[0])))
        elif name not in ("l", "u") and not np.isfinite(values).all():
            violations.append("infinite value in {} at index {}".format(
                name, int(np.flatnonzero(~np.isfinite(values))[0])))
    for name in ("A", "G"):
        matrix = getattr(problem, name)
        entries = matrix.data.data if matrix.is_sparse else matrix.data
        if np.isnan(entries).any():
            violations.append("NaN in {}".format(name))
        elif not np.isfinite(entries).all():
            violations.append("infinite value in {}".format(name))

    if problem.l.shape == problem.u.shape:
        for index in np.flatnonzero(problem.l > problem.u):
            violations.append("crossed bounds at index {}".format(int(index)))
        for index in np.flatnonzero(problem.l == np.inf):
            violations.append("lower bound +inf at index {}".format(int(index)))
        for index in np.flatnonzero(problem.u == -np.inf):
            violations.append("upper bound -inf at index {}".format(int(index)))
    return violations


def check_problem(problem):
    """Raise ``ValidationError`` listing every violation of `problem`."""
    violations = validate_problem(problem)
    if violations:
        raise ValidationError(violations)


def build_saddle_form(problem):
    """Stack the constraints of `problem` into ``K = [G; A]``, ``q = (h; b)``."""
    check_problem(problem)
    K = ConstraintMatrix.vstack([problem.G, problem.A], problem.storage)
    q = np.concatenate([problem.h, problem.b])
    return SaddleForm(K, _freeze(q), problem.num_inequalities, problem.l, problem.u, problem.c)


def grid_edges(k):
    """Return the directed edges ``(tail, head)`` of the 8-connected ``k x k`` grid.

    Node ``(r, c)`` has index ``r * k + c``; edges are listed per tail node in `GRID_MOVES` order.
    """
    edges = []
    for row in range(k):
        for col in range(k):
            for d_row, d_col in GRID_MOVES:
                r, c = row + d_row, col + d_col
                if 0 <= r < k and 0 <= c < k:
                    edges.append((row * k + col, r * k + c))
    return edges


def gen_grid_shortest_path(k, vertex_costs):
    """Flow LP of the shortest path from the top left to the bottom right vertex of a grid.

    Each directed edge costs the traversal cost of the vertex it enters, so a path costs the sum
    of the vertices it visits, excluding the source.
    """
    if k < 2:
        raise ProblemParameterError("grid side must be at least 2, got {}".format(k))
    vertex_costs = np.asarray(vertex_costs, dtype=float)
    if vertex_costs.shape != (k, k):
        raise ProblemParameterError("vertex costs must have shape ({0}, {0}), got {1}".format(k, vertex_costs.shape))
    if not np.isfinite(vertex_costs).all() or (vertex_costs < 0).any():
        raise ProblemParameterError("vertex costs must be finite and nonnegative")

    edges = np.array(grid_edges(k))
    tails, heads = edges[:, 0], edges[:, 1]
    num_edges = edges.shape[0]
    columns = np.arange(num_edges)
    A = ConstraintMatrix.from_triplets(
        np.concatenate([tails, heads]),
        np.concatenate([columns, columns]),
        np.concatenate([np.ones(num_edges), -np.ones(num_edges)]),
        shape=(k * k, num_edges),
    )
    b = np.zeros(k * k)
    b[0] = 1.0
    b[-1] = -1.0
    return LpProblem(
        c=vertex_costs.ravel()[heads],
        A=A,
        b=b,
        l=np.zeros(num_edges),
        u=np.ones(num_edges),
        storage=Storage.SPARSE_CSR,
        name="grid{}".format(k),
    )


def gen_grid_costs(k, seed=None, low=0.0, high=10.0):
    """Seeded uniform vertex costs in ``[low, high)`` for `gen_grid_shortest_path`."""
    if k < 2:
        raise ProblemParameterError("grid side must be at least 2, got {}".format(k))
    return np.random.default_rng(seed).uniform(low, high, size=(k, k))


def knapsack_weights(n_items, d, seed=None):
    """Integer weights drawn uniformly from 3 to 8 (inclusive), shape ``(d, n_items)``."""
    low, high = KNAPSACK_WEIGHT_RANGE
    return np.random.default_rng(seed).integers(low, high + 1, size=(d, n_items)).astype(float)


def gen_knapsack(n_items, d, capacity=DEFAULT_KNAPSACK_CAPACITY, weights=None, values=None, seed=None):
    """LP relaxation of the multi-dimensional knapsack problem in minimisation form.

    ``max values^T x s.t. W x <= capacity, 0 <= x <= 1`` becomes
    ``min -values^T x s.t. -W x >= -capacity``. Missing weights are drawn with `knapsack_weights`
    and missing values uniformly from ``[0, 1)``, both from `seed`.
    """
    if n_items < 1:
        raise ProblemParameterError("need at least one item, got {}".format(n_items))
    if d < 1:
        raise ProblemParameterError("need at least one dimension, got {}".format(d))
    capacity = np.broadcast_to(np.asarray(capacity, dtype=float), (d,))
    if not (capacity > 0).all():
        raise ProblemParameterError("capacity must be positive")
    rng = np.random.default_rng(seed)
    if weights is None:
        weights = knapsack_weights(n_items, d, rng)
    weights = np.asarray(weights, dtype=float).reshape(d, n_items)
    if values is None:
        values = rng.uniform(size=n_items)
    values = np.asarray(values, dtype=float).ravel()
    if values.shape != (n_items,) or not np.isfinite(values).all():
        raise ProblemParameterError("values must be {} finite numbers".format(n_items))
    return LpProblem(
        c=-values,
        G=-weights,
        h=-capacity,
        l=np.zeros(n_items),
        u=np.ones(n_items),
        storage=Storage.DENSE,
        name="knapsack{}x{}".format(n_items, d),
    )
