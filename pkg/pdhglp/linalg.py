"""Dense and CSR matrix kernels used by the PDHG iterations."""
import logging
from collections import namedtuple
from enum import Enum

import numpy as np
import scipy.sparse

from pdhglp.conf import app_settings
from pdhglp.exceptions import DimensionError

logger = logging.getLogger(app_settings.LOGGER_NAME)


class Storage(str, Enum):
    DENSE = "dense"
    SPARSE_CSR = "sparse_csr"


SpectralNormEstimate = namedtuple("SpectralNormEstimate", ["value", "converged", "zero_matrix", "iterations"])


class ConstraintMatrix:
    """An immutable constraint matrix stored either densely or in CSR.

    @ivar data: ``numpy.ndarray`` (dense) or ``scipy.sparse.csr_matrix`` (sparse).
    @ivar storage: The storage format.

    CSR matrices are canonical after construction: duplicates summed, explicit zeros pruned and
    column indices sorted within each row.
    """

    def __init__(self, data, storage=None):
        if storage is None:
            storage = Storage.SPARSE_CSR if scipy.sparse.issparse(data) else Storage.DENSE
        storage = Storage(storage)
        if storage is Storage.SPARSE_CSR:
            data = scipy.sparse.csr_matrix(data, dtype=_float_dtype(data), copy=True)
            data.sum_duplicates()
            data.eliminate_zeros()
            data.sort_indices()
        else:
            if scipy.sparse.issparse(data):
                data = data.toarray()
            data = np.array(data, dtype=_float_dtype(data), order="C", ndmin=2)
            if data.ndim != 2:
                raise DimensionError("a constraint matrix must be two-dimensional")
            data.setflags(write=False)
        self.data = data
        self.storage = storage

    @classmethod
    def from_triplets(cls, rows, cols, values, shape, storage=Storage.SPARSE_CSR):
        coo = scipy.sparse.coo_matrix((np.asarray(values, dtype=float), (rows, cols)), shape=shape)
        return cls(coo, storage)

    @classmethod
    def empty(cls, ncols, storage=Storage.SPARSE_CSR):
        if Storage(storage) is Storage.SPARSE_CSR:
            return cls(scipy.sparse.csr_matrix((0, ncols)), storage)
        return cls(np.zeros((0, ncols)), storage)

    @classmethod
    def vstack(cls, blocks, storage=None):
        storage = Storage(storage or blocks[0].storage)
        nonempty = [block for block in blocks if block.nrows]
        if not nonempty:
            return cls.empty(blocks[0].ncols, storage)
        blocks = nonempty
        if storage is Storage.SPARSE_CSR:
            stacked = scipy.sparse.vstack([block.to_csr() for block in blocks], format="csr")
        else:
            stacked = np.vstack([block.to_dense() for block in blocks])
        return cls(stacked, storage)

    @property
    def shape(self):
        return self.data.shape

    @property
    def nrows(self):
        return self.data.shape[0]

    @property
    def ncols(self):
        return self.data.shape[1]

    @property
    def dtype(self):
        return self.data.dtype

    @property
    def is_sparse(self):
        return self.storage is Storage.SPARSE_CSR

    @property
    def nnz(self):
        if self.is_sparse:
            return self.data.nnz
        return int(np.count_nonzero(self.data))

    def to_dense(self):
        if self.is_sparse:
            return self.data.toarray()
        return np.array(self.data)

    def to_csr(self):
        if self.is_sparse:
            return self.data
        return scipy.sparse.csr_matrix(self.data)

    def as_storage(self, storage):
        if Storage(storage) is self.storage:
            return self
        return ConstraintMatrix(self.data, storage)

    def astype(self, dtype):
        if self.dtype == dtype:
            return self
        return ConstraintMatrix(self.data.astype(dtype), self.storage)

    def row_slice(self, start, stop):
        return ConstraintMatrix(self.data[start:stop], self.storage)

    def scale(self, row_scale, col_scale):
        """Return ``diag(row_scale) @ self @ diag(col_scale)`` in the same storage."""
        row_scale = np.asarray(row_scale, dtype=self.dtype)
        col_scale = np.asarray(col_scale, dtype=self.dtype)
        if row_scale.shape != (self.nrows,) or col_scale.shape != (self.ncols,):
            raise DimensionError("scaling vectors of shape {} and {} do not fit a {} matrix".format(
                row_scale.shape, col_scale.shape, self.shape))
        if self.is_sparse:
            if self.data.nnz == 0:
                return ConstraintMatrix(self.data, self.storage)
            scaled = scipy.sparse.diags(row_scale) @ self.data @ scipy.sparse.diags(col_scale)
            return ConstraintMatrix(scaled.tocsr(), self.storage)
        return ConstraintMatrix(self.data * row_scale[:, None] * col_scale[None, :], self.storage)

    def matvec(self, v):
        return matvec(self, v)

    def rmatvec(self, v):
        return matvec_transpose(self, v)

    def __eq__(self, other):
        if not isinstance(other, ConstraintMatrix) or self.shape != other.shape:
            return False
        if self.is_sparse and other.is_sparse:
            return (self.data != other.data).nnz == 0
        return np.array_equal(self.to_dense(), other.to_dense())

    __hash__ = None

    def __repr__(self):
        return "ConstraintMatrix(shape={}, storage={}, nnz={})".format(self.shape, self.storage.value, self.nnz)


def _float_dtype(data):
    dtype = getattr(data, "dtype", None)
    if dtype is not None and dtype == np.float32:
        return np.float32
    return np.float64


def _coerce_vector(M, v, length, what):
    v = np.asarray(v, dtype=M.dtype)
    if v.shape != (length,):
        raise DimensionError("{} expects a vector of length {}, got shape {}".format(what, length, v.shape))
    return v


def matvec(M, v):
    """Return ``M @ v``."""
    v = _coerce_vector(M, v, M.ncols, "matvec")
    return np.asarray(M.data @ v).ravel()


def matvec_transpose(M, v):
    """Return ``M.T @ v``.

    For CSR storage this is a column scatter over the rows (``csr.T`` is a CSC view sharing
    the CSR arrays), so no transposed copy is ever materialised.
    """
    v = _coerce_vector(M, v, M.nrows, "matvec_transpose")
    return np.asarray(M.data.T @ v).ravel()


def _row_ids(csr):
    return np.repeat(np.arange(csr.shape[0]), np.diff(csr.indptr))


def row_col_inf_norms(M):
    """Return the row and column infinity norms of ``M``; empty rows/columns have norm 0."""
    if M.is_sparse:
        csr = M.data
        magnitudes = np.abs(csr.data)
        rows = np.zeros(M.nrows, dtype=M.dtype)
        cols = np.zeros(M.ncols, dtype=M.dtype)
        np.maximum.at(rows, _row_ids(csr), magnitudes)
        np.maximum.at(cols, csr.indices, magnitudes)
        return rows, cols
    magnitudes = np.abs(M.data)
    rows = magnitudes.max(axis=1) if M.ncols else np.zeros(M.nrows, dtype=M.dtype)
    cols = magnitudes.max(axis=0) if M.nrows else np.zeros(M.ncols, dtype=M.dtype)
    return rows, cols


def abs_power_sums(M, p):
    """Return row and column sums of ``|M_ij|**p`` taken over the nonzero entries only.

    Restricting to nonzeros makes ``p = 0`` count the nonzeros of each row/column.
    """
    if M.is_sparse:
        powered = M.data.copy()
        powered.data = np.abs(powered.data) ** p
        rows = np.asarray(powered.sum(axis=1)).ravel()
        cols = np.asarray(powered.sum(axis=0)).ravel()
        return rows, cols
    magnitudes = np.abs(M.data)
    nonzero = magnitudes != 0
    powered = np.where(nonzero, magnitudes, 1.0) ** p
    powered[~nonzero] = 0.0
    return powered.sum(axis=1), powered.sum(axis=0)


def row_col_p_norms(M, p):
    """Return the row and column ``p``-norms of ``M`` (``p = inf`` gives the max norm)."""
    if np.isinf(p):
        return row_col_inf_norms(M)
    if p <= 0:
        raise ValueError("p-norms need p > 0, got {}".format(p))
    rows, cols = abs_power_sums(M, p)
    return rows ** (1.0 / p), cols ** (1.0 / p)


def estimate_spectral_norm(M, tol=1e-6, max_iter=1000, seed=0):
    """Estimate ``||M||_2`` by power iteration on ``M.T @ M``.

    The estimate ``||M v||`` for a unit vector ``v`` never exceeds the true norm. The iteration
    stops once the relative eigenvector residual ``||M.T M v - lambda v|| / lambda`` is at most
    ``tol``.

    @returntype: SpectralNormEstimate
    """
    if M.nrows == 0 or M.ncols == 0 or M.nnz == 0:
        return SpectralNormEstimate(0.0, True, True, 0)
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(M.ncols)
    v /= np.linalg.norm(v)
    value = 0.0
    for iteration in range(1, max_iter + 1):
        Mv = matvec(M, v)
        w = matvec_transpose(M, Mv)
        eigenvalue = float(v @ w)
        value = max(value, float(np.linalg.norm(Mv)))
        w_norm = np.linalg.norm(w)
        if eigenvalue <= 0.0 or w_norm == 0.0:
            # v landed in the null space; restart from a fresh direction.
            v = rng.standard_normal(M.ncols)
            v /= np.linalg.norm(v)
            continue
        residual = np.linalg.norm(w - eigenvalue * v) / eigenvalue
        if residual <= tol:
            return SpectralNormEstimate(value, True, False, iteration)
        v = w / w_norm
    logger.debug("Spectral norm estimate did not converge in %d iterations", max_iter)
    return SpectralNormEstimate(value, False, False, max_iter)
