"""
Dense complex linear algebra primitives.

Everything here is a pure function of numpy arrays. Vectors are 1-d arrays,
bases are 2-d arrays holding one basis vector per column.
"""

import logging
from typing import NamedTuple
from typing import Optional, Tuple

import numpy as np
from numpy.linalg import norm

logger = logging.getLogger(__name__)

DTYPE = np.complex128


class NotSquare(Exception):

    def __init__(self, shape: Tuple[int, ...]):
        self.shape = shape
        self.message = f"Expected a square matrix, got shape {shape}."
        return

    def __str__(self) -> str:
        return self.message


class NotHermitian(Exception):

    def __init__(self, deviation: float, threshold: float):
        self.deviation = deviation
        self.threshold = threshold
        self.message = (
            f"Matrix is not Hermitian: |m - m^dagger| = {deviation:.3e} "
            f"exceeds {threshold:.3e}."
        )
        return

    def __str__(self) -> str:
        return self.message


class DimensionMismatch(Exception):

    def __init__(self, expected: int, found: int, what: str = "operand"):
        self.expected = expected
        self.found = found
        self.message = (
            f"Dimension mismatch for {what}: expected {expected}, "
            f"found {found}."
        )
        return

    def __str__(self) -> str:
        return self.message


class InvalidTolerance(Exception):

    def __init__(self, message: str):
        self.message = message
        return

    def __str__(self) -> str:
        return self.message


class Tolerance(NamedTuple):
    """ Numerical cut-offs used throughout the analysis.

    eps_rank -- singular value and eigenvalue cut-off, relative to the norm
        of the matrix being decomposed.
    eps_contain -- largest per-column residual still counted as inside a
        subspace.
    eps_prob -- slack used when comparing probabilities.
    """

    eps_rank: float = 1e-9
    eps_contain: float = 1e-8
    eps_prob: float = 1e-9

    def validate(self) -> "Tolerance":
        for name, value in self._asdict().items():
            if not (np.isfinite(value) and value > 0):
                raise InvalidTolerance(
                    f"Tolerance {name} must be strictly positive, got {value}."
                )

        if self.eps_contain < self.eps_rank:
            raise InvalidTolerance(
                "eps_contain must not be smaller than eps_rank "
                f"({self.eps_contain} < {self.eps_rank})."
            )
        return self

    @classmethod
    def from_contain(cls, eps_contain: float) -> "Tolerance":
        """ The command line rule: eps_rank and eps_prob are a tenth of it. """

        return cls(
            eps_rank=eps_contain / 10,
            eps_contain=eps_contain,
            eps_prob=eps_contain / 10,
        ).validate()


DEFAULT_TOLERANCE = Tolerance()


def as_matrix(m, square: bool = False) -> np.ndarray:
    """ Coerce input to a 2-d complex array with finite entries. """

    arr = np.asarray(m, dtype=DTYPE)
    if arr.ndim != 2:
        raise ValueError(f"Expected a 2-d matrix, got {arr.ndim} dimensions.")

    if not np.all(np.isfinite(arr)):
        raise ValueError("Matrix contains NaN or infinite entries.")

    if square and arr.shape[0] != arr.shape[1]:
        raise NotSquare(arr.shape)
    return arr


def dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def hermitize(m: np.ndarray) -> np.ndarray:
    return (m + dagger(m)) / 2


def fix_phase(vectors: np.ndarray) -> np.ndarray:
    """ Rotate the global phase of each column so that its first
    non-negligible entry is real and positive.

    Eigen-solvers return columns up to an arbitrary phase, this makes the
    output reproducible and easier to read.
    """

    out = np.array(vectors, dtype=DTYPE, copy=True)
    for j in range(out.shape[1]):
        column = out[:, j]
        mags = np.abs(column)
        if mags.size == 0 or mags.max() == 0:
            continue

        # Skip entries that are only rounding noise.
        first = int(np.argmax(mags > mags.max() * 1e-6))
        out[:, j] = column * (np.conj(column[first]) / mags[first])
    return out


def hermitian_eig(
    m,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> Tuple[np.ndarray, np.ndarray]:
    """ Spectral decomposition of a Hermitian matrix.

    Keyword arguments:
    m -- A square matrix, Hermitian up to eps_rank * |m|.
    tol -- Tolerances.

    Returns:
    np.ndarray -- The real eigenvalues in descending order.
    np.ndarray -- The eigenvectors as columns, in the same order.
    """

    arr = as_matrix(m, square=True)
    scale = norm(arr, 2) if arr.size > 0 else 0.0
    deviation = norm(arr - dagger(arr), 2) if arr.size > 0 else 0.0

    threshold = tol.eps_rank * scale
    if deviation > threshold:
        raise NotHermitian(float(deviation), float(threshold))

    # Rounding may leave m slightly off Hermitian, the symmetric part is what
    # we actually want to decompose.
    values, vectors = np.linalg.eigh(hermitize(arr))
    order = np.argsort(values, kind="stable")[::-1]
    return values[order], fix_phase(vectors[:, order])


def orthonormalize_extend(
    basis: np.ndarray,
    candidate: np.ndarray,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> Optional[np.ndarray]:
    """ One Gram-Schmidt step.

    Keyword arguments:
    basis -- A d x k matrix with orthonormal columns (k may be 0).
    candidate -- A length d vector.
    tol -- Tolerances.

    Returns:
    The normalised residual of candidate against the basis, or None if the
    residual norm is at most eps_rank * (1 + |candidate|).
    """

    candidate = np.asarray(candidate, dtype=DTYPE).reshape(-1)
    if basis.shape[0] != candidate.shape[0]:
        raise DimensionMismatch(basis.shape[0], candidate.shape[0], "vector")

    residual = candidate.copy()

    # Orthogonalise twice, the second pass mops up cancellation error.
    for _ in range(2):
        if basis.shape[1] == 0:
            break
        residual = residual - basis @ (dagger(basis) @ residual)

    size = norm(residual)
    if size <= tol.eps_rank * (1 + norm(candidate)):
        return None
    return residual / size


def null_space(
    m,
    tol: Tolerance = DEFAULT_TOLERANCE,
    scale: Optional[float] = None,
) -> np.ndarray:
    """ Orthonormal basis of the (numerical) kernel of a matrix.

    Keyword arguments:
    m -- Any rectangular matrix.
    tol -- Tolerances.
    scale -- The singular value cut-off is eps_rank * max(|m|, scale).
        Passing the expected size of the operator keeps rounding noise in an
        operator that should be exactly zero from being read as rank.

    Returns:
    A cols x k matrix whose columns span {v : |m v| <= eps_rank * |m|}.
    """

    arr = np.asarray(m, dtype=DTYPE)
    if arr.ndim != 2:
        raise ValueError(f"Expected a 2-d matrix, got {arr.ndim} dimensions.")

    ncols = arr.shape[1]
    if arr.shape[0] == 0 or ncols == 0:
        return np.eye(ncols, dtype=DTYPE)

    _, singular, vh = np.linalg.svd(arr, full_matrices=True)
    top = singular[0] if singular.size > 0 else 0.0
    cutoff = tol.eps_rank * max(top, 0.0 if scale is None else scale)

    rank = int(np.sum(singular > cutoff)) if top > 0 else 0
    return dagger(vh[rank:])


def range_basis(
    m,
    tol: Tolerance = DEFAULT_TOLERANCE,
    scale: Optional[float] = None,
) -> np.ndarray:
    """ Orthonormal basis of the column space, using the same cut-off rule
    as `null_space`.
    """

    arr = np.asarray(m, dtype=DTYPE)
    nrows = arr.shape[0]
    if arr.shape[1] == 0:
        return np.zeros((nrows, 0), dtype=DTYPE)

    u, singular, _ = np.linalg.svd(arr, full_matrices=False)
    top = singular[0] if singular.size > 0 else 0.0
    cutoff = tol.eps_rank * max(top, 0.0 if scale is None else scale)

    rank = int(np.sum(singular > cutoff)) if top > 0 else 0
    return u[:, :rank]
