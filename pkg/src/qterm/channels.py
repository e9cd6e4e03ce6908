"""
Quantum states, two-outcome measurements and super-operators in Kraus form.

Super-operators act on d x d matrices as E(A) = sum_i E_i A E_i^dagger.
Images and pre-images of subspaces are computed from the Kraus elements
directly, without forming the Choi matrix.
"""

import logging
from typing import Sequence
from typing import Optional

import numpy as np
from numpy.linalg import norm

from qterm.linalg import (
    DTYPE, DEFAULT_TOLERANCE, Tolerance, DimensionMismatch,
    as_matrix, dagger, hermitize, null_space, range_basis
)
from qterm.subspaces import Subspace, complement

logger = logging.getLogger(__name__)


class InvalidChannel(Exception):

    def __init__(self, message: str):
        self.message = message
        return

    def __str__(self) -> str:
        return self.message


class InvalidMeasurement(Exception):

    def __init__(self, message: str):
        self.message = message
        return

    def __str__(self) -> str:
        return self.message


class InvalidState(Exception):

    def __init__(self, message: str):
        self.message = message
        return

    def __str__(self) -> str:
        return self.message


class DensityOperator(object):
    """ A (possibly sub-normalised) density operator. """

    def __init__(
        self,
        matrix,
        tol: Tolerance = DEFAULT_TOLERANCE,
        validate: bool = True,
    ):
        """
        Keyword arguments:
        matrix -- A d x d matrix.
        tol -- Tolerances for the validation.
        validate -- Check that the matrix is Hermitian, positive and has
            trace at most one. Operations that produce a state from a valid
            state with a completely positive map skip this.
        """

        try:
            arr = np.array(as_matrix(matrix, square=True), copy=True)
        except ValueError as e:
            raise InvalidState(str(e))
        except Exception as e:
            raise InvalidState(getattr(e, "message", str(e)))

        if validate:
            self._validate(arr, tol)

        arr.flags.writeable = False
        self.matrix = arr
        return

    @staticmethod
    def _validate(arr: np.ndarray, tol: Tolerance) -> None:
        scale = max(1.0, norm(arr, 2))

        deviation = norm(arr - dagger(arr), 2)
        if deviation > tol.eps_rank * scale:
            raise InvalidState(
                f"Density operator is not Hermitian (deviation "
                f"{deviation:.3e})."
            )

        lowest = np.linalg.eigvalsh(hermitize(arr)).min()
        if lowest < -10 * tol.eps_rank * scale:
            raise InvalidState(
                f"Density operator has a negative eigenvalue ({lowest:.3e})."
            )

        trace = float(np.real(np.trace(arr)))
        if trace > 1 + tol.eps_prob:
            raise InvalidState(
                f"Density operator has trace {trace:.12g}, which exceeds 1."
            )
        return

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))

    def __repr__(self) -> str:
        return f"<DensityOperator dim={self.dim} trace={self.trace:.6g}>"

    @classmethod
    def from_pure(
        cls,
        psi,
        tol: Tolerance = DEFAULT_TOLERANCE,
    ) -> "DensityOperator":
        """ The projector onto a vector |psi><psi|. """

        vec = np.asarray(psi, dtype=DTYPE).reshape(-1)
        return cls(np.outer(vec, vec.conj()), tol)

    @classmethod
    def basis_state(cls, dim: int, index: int) -> "DensityOperator":
        if not (0 <= index < dim):
            raise InvalidState(
                f"Basis index {index} is outside of 0..{dim - 1}."
            )

        arr = np.zeros((dim, dim), dtype=DTYPE)
        arr[index, index] = 1
        return cls(arr, validate=False)


class SuperOperator(object):
    """ A completely positive map given by its Kraus elements.

    `heisenberg` marks the dual (Heisenberg picture) of a super-operator.
    Validation always applies to the Schroedinger-picture map, so the dual
    of a valid channel is valid too.
    """

    def __init__(
        self,
        kraus: Sequence,
        trace_preserving: bool = True,
        tol: Tolerance = DEFAULT_TOLERANCE,
        heisenberg: bool = False,
        validate: bool = True,
    ):
        """
        Keyword arguments:
        kraus -- A non-empty list of d x d matrices.
        trace_preserving -- If true, sum_i E_i^dagger E_i must equal the
            identity, otherwise it must not exceed it.
        tol -- Tolerances for the validation.
        heisenberg -- This object is the dual of the map with Kraus
            elements E_i^dagger.
        validate -- Check the conditions above, raising InvalidChannel.
        """

        try:
            mats = [as_matrix(k, square=True) for k in kraus]
        except ValueError as e:
            raise InvalidChannel(str(e))
        except Exception as e:
            raise InvalidChannel(getattr(e, "message", str(e)))

        if len(mats) == 0:
            raise InvalidChannel(
                "A super-operator needs at least one Kraus element."
            )

        dims = {m.shape[0] for m in mats}
        if len(dims) != 1:
            raise InvalidChannel(
                f"Kraus elements have different dimensions: {sorted(dims)}."
            )

        stacked = np.stack(mats)
        stacked.flags.writeable = False

        self.kraus = stacked
        self.trace_preserving = trace_preserving
        self.heisenberg = heisenberg

        self.defect = self._defect()
        if validate:
            self._validate(tol)

        self.is_unitary = (
            self.rank == 1
            and norm(
                dagger(stacked[0]) @ stacked[0] - np.eye(self.dim),
                2
            ) <= tol.eps_rank * self.dim
        )
        return

    @property
    def dim(self) -> int:
        return self.kraus.shape[1]

    @property
    def rank(self) -> int:
        """ The number of Kraus elements. """
        return self.kraus.shape[0]

    def __repr__(self) -> str:
        kind = "dual " if self.heisenberg else ""
        return (
            f"<{kind}SuperOperator dim={self.dim} kraus={self.rank} "
            f"trace_preserving={self.trace_preserving}>"
        )

    def _gram(self) -> np.ndarray:
        """ sum_i E_i^dagger E_i of the Schroedinger-picture map. """

        if self.heisenberg:
            return np.einsum("kij,klj->il", self.kraus, self.kraus.conj())
        else:
            return np.einsum("kji,kjl->il", self.kraus.conj(), self.kraus)

    def _defect(self) -> float:
        """ How far the map is from being trace preserving. """
        return float(norm(self._gram() - np.eye(self.dim), 2))

    def _validate(self, tol: Tolerance) -> None:
        threshold = tol.eps_rank * self.dim

        if self.trace_preserving:
            if self.defect > threshold:
                raise InvalidChannel(
                    "Kraus elements do not sum to the identity "
                    f"(|sum E^dagger E - I| = {self.defect:.3e})."
                )
        else:
            top = np.linalg.eigvalsh(hermitize(self._gram())).max()
            if top > 1 + threshold:
                raise InvalidChannel(
                    "Kraus elements are not trace non-increasing "
                    f"(largest eigenvalue of sum E^dagger E is {top:.12g})."
                )
        return

    @classmethod
    def identity(cls, dim: int) -> "SuperOperator":
        return cls([np.eye(dim, dtype=DTYPE)])

    @classmethod
    def unitary(
        cls,
        u,
        tol: Tolerance = DEFAULT_TOLERANCE,
    ) -> "SuperOperator":
        return cls([u], trace_preserving=True, tol=tol)


class Measurement(object):
    """ A two outcome measurement {M_0, M_1}; outcome 0 halts. """

    def __init__(
        self,
        m0,
        m1,
        tol: Tolerance = DEFAULT_TOLERANCE,
        validate: bool = True,
    ):
        try:
            arr0 = as_matrix(m0, square=True)
            arr1 = as_matrix(m1, square=True)
        except ValueError as e:
            raise InvalidMeasurement(str(e))
        except Exception as e:
            raise InvalidMeasurement(getattr(e, "message", str(e)))

        if arr0.shape != arr1.shape:
            raise InvalidMeasurement(
                f"M0 and M1 have different shapes: {arr0.shape} and "
                f"{arr1.shape}."
            )

        completeness = dagger(arr0) @ arr0 + dagger(arr1) @ arr1
        self.defect = float(norm(completeness - np.eye(arr0.shape[0]), 2))

        if validate and self.defect > tol.eps_rank * arr0.shape[0]:
            raise InvalidMeasurement(
                "Measurement is not complete "
                f"(|M0^dagger M0 + M1^dagger M1 - I| = {self.defect:.3e})."
            )

        arr0 = np.array(arr0, copy=True)
        arr1 = np.array(arr1, copy=True)
        arr0.flags.writeable = False
        arr1.flags.writeable = False

        self.m0 = arr0
        self.m1 = arr1
        return

    @property
    def dim(self) -> int:
        return self.m0.shape[0]

    def __repr__(self) -> str:
        return f"<Measurement dim={self.dim}>"

    def probability(self, rho: DensityOperator, outcome: int) -> float:
        """ tr(M_k rho M_k^dagger), unnormalised. """

        m = self.m0 if outcome == 0 else self.m1
        return float(np.real(np.trace(m @ rho.matrix @ dagger(m))))


def apply_operator(e: SuperOperator, a: np.ndarray) -> np.ndarray:
    """ sum_i E_i A E_i^dagger for any square matrix A. """

    if a.shape != (e.dim, e.dim):
        raise DimensionMismatch(e.dim, a.shape[0], "operator")

    return np.einsum(
        "kij,jl,kml->im",
        e.kraus,
        a,
        e.kraus.conj(),
        optimize=True,
    )


def apply(e: SuperOperator, rho: DensityOperator) -> DensityOperator:
    """ E(rho). Completely positive maps keep states valid. """

    return DensityOperator(apply_operator(e, rho.matrix), validate=False)


def dual(e: SuperOperator) -> SuperOperator:
    """ The Schroedinger-Heisenberg dual E*(A) = sum_i E_i^dagger A E_i. """

    return SuperOperator(
        [dagger(k) for k in e.kraus],
        trace_preserving=e.trace_preserving,
        heisenberg=not e.heisenberg,
        validate=False,
    )


def image_subspace(
    e: SuperOperator,
    x: Subspace,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> Subspace:
    """ The image E(X) = supp E(P_X).

    E(P_X) = sum_i (E_i B)(E_i B)^dagger, so the support is the column
    space of the blocks E_i B placed side by side.
    """

    if x.ambient_dim != e.dim:
        raise DimensionMismatch(e.dim, x.ambient_dim, "subspace")

    if x.is_zero:
        return x
    elif e.is_unitary:
        return Subspace(e.kraus[0] @ x.basis)

    blocks = np.concatenate([k @ x.basis for k in e.kraus], axis=1)
    return Subspace(range_basis(blocks, tol, scale=1.0))


def preimage_subspace(
    e: SuperOperator,
    x: Subspace,
    tol: Tolerance = DEFAULT_TOLERANCE,
    perp: Optional[Subspace] = None,
) -> Subspace:
    """ The largest subspace Y with E(Y) inside X.

    This is the kernel of E*(P_{X^perp}) = sum_i (C^dagger E_i)^dagger
    (C^dagger E_i), where C is a basis of X^perp. The kernel is read off
    the stacked blocks C^dagger E_i, whose singular values are the square
    roots of the eigenvalues of E*(P_{X^perp}). This holds for trace
    non-increasing maps too.

    Keyword arguments:
    e -- The super-operator.
    x -- The target subspace.
    tol -- Tolerances.
    perp -- The complement of x, if the caller has it already.
    """

    if x.ambient_dim != e.dim:
        raise DimensionMismatch(e.dim, x.ambient_dim, "subspace")

    if x.is_full:
        return x
    elif e.is_unitary:
        return Subspace(dagger(e.kraus[0]) @ x.basis)

    c = complement(x, tol) if perp is None else perp
    blocks = np.concatenate([dagger(c.basis) @ k for k in e.kraus], axis=0)
    return Subspace(null_space(blocks, tol, scale=1.0))
