"""Dense symmetric linear algebra."""

from dataclasses import dataclass

import numpy as np

from .exceptions import NotPositiveDefiniteError, raise_dimension_mismatch, raise_exception
from .solver_logging import get_logger

LOG = get_logger()

# Relative pivot threshold below which a matrix is declared not positive definite.
PIVOT_TOLERANCE = 1e-13


@dataclass(frozen=True)
class UpperTriangular:
    """Upper-triangular Cholesky factor U with A = UᵀU."""

    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def dim(self) -> int:
        """Dimension of the factor."""
        return self.values.shape[0]

    def __array__(self, dtype=None, copy=None):
        if copy:
            return np.array(self.values, dtype=dtype, copy=True)
        return np.asarray(self.values, dtype=dtype)


def cholesky(matrix) -> UpperTriangular:
    """Factorize a symmetric positive definite matrix as A = UᵀU.

    Right-looking elimination without pivoting. Each step takes the square
    root of the pivot, scales the pivot row and applies a rank-one update to
    the trailing block.

    :param matrix: symmetric matrix (array-like)
    :returns: upper-triangular factor
    :raises NotPositiveDefiniteError: if a pivot falls to
        ``PIVOT_TOLERANCE`` times the largest diagonal entry or below
    """
    work = np.array(np.asarray(matrix), dtype=float, copy=True)
    if work.ndim != 2 or work.shape[0] != work.shape[1]:
        raise_dimension_mismatch(
            f"matrix must be square, got shape {work.shape}", __name__
        )
    dim = work.shape[0]
    if dim == 0:
        return UpperTriangular(np.zeros((0, 0)))

    threshold = PIVOT_TOLERANCE * max(float(np.max(np.diag(work))), 0.0)
    upper = np.zeros_like(work)
    for k in range(dim):
        pivot = work[k, k]
        if not pivot > threshold:
            raise_exception(
                NotPositiveDefiniteError,
                "NotPositiveDefinite",
                f"pivot {pivot:.3e} at index {k} is not above {threshold:.3e}",
                __name__,
            )
        root = np.sqrt(pivot)
        upper[k, k] = root
        upper[k, k + 1 :] = work[k, k + 1 :] / root
        row = upper[k, k + 1 :]
        work[k + 1 :, k + 1 :] -= np.outer(row, row)

    LOG.debug("Cholesky factorization of dimension %d done", dim)
    return UpperTriangular(upper)


def apply_upper(factor: UpperTriangular, vector) -> np.ndarray:
    """Compute z = Uy.

    :param factor: Cholesky factor
    :param vector: vector y
    :returns: vector z with ‖z‖² = yᵀAy
    """
    y = np.asarray(vector, dtype=float)
    if y.shape != (factor.dim,):
        raise_dimension_mismatch(
            f"vector of length {y.shape} does not match factor of dimension {factor.dim}",
            __name__,
        )
    return factor.values @ y
