"""
The lattice of subspaces of C^d and finite unions of subspaces.

A subspace is held as a d x k matrix with orthonormal columns. The projector
is derived on demand. Unions are kept in a canonical form where no component
lies inside another one; the empty union stands for {0}.
"""

import logging
from typing import NamedTuple
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
from numpy.linalg import norm

from qterm.linalg import (
    DTYPE, DEFAULT_TOLERANCE, Tolerance, DimensionMismatch,
    dagger, hermitian_eig, orthonormalize_extend, null_space
)

logger = logging.getLogger(__name__)


class NotPSD(Exception):

    def __init__(self, eigenvalue: float, threshold: float):
        self.eigenvalue = eigenvalue
        self.threshold = threshold
        self.message = (
            f"Operator is not positive semi-definite: eigenvalue "
            f"{eigenvalue:.3e} is below {-threshold:.3e}."
        )
        return

    def __str__(self) -> str:
        return self.message


class FragileContainment(NamedTuple):
    """ A containment decision taken close to the eps_contain cut-off. """

    residual: float
    threshold: float
    outer_dim: int
    inner_dim: int
    decision: bool


class Diagnostics(object):
    """ Collects fragile containment decisions during an analysis. """

    def __init__(self):
        self.records: List[FragileContainment] = []
        return

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[FragileContainment]:
        return iter(self.records)

    @property
    def fragile(self) -> bool:
        return len(self.records) > 0

    def record(self, entry: FragileContainment) -> None:
        logger.warning(
            "Fragile containment: residual %.3e is within a factor of 10 of "
            "eps_contain %.3e (decided %s).",
            entry.residual,
            entry.threshold,
            entry.decision,
        )
        self.records.append(entry)
        return

    def extend(self, other: "Diagnostics") -> None:
        """ Append the records of another collector, already logged. """
        self.records.extend(other.records)
        return

    def as_serializable(self) -> List[Dict[str, object]]:
        return [r._asdict() for r in self.records]


class Subspace(object):
    """ A subspace of C^d given by an orthonormal basis (columns). """

    def __init__(
        self,
        basis,
        tol: Optional[Tolerance] = None,
    ):
        """
        Keyword arguments:
        basis -- A d x k matrix with orthonormal columns.
        tol -- If given, the columns are checked to be orthonormal within
            tol.eps_rank.
        """

        arr = np.array(basis, dtype=DTYPE, copy=True)
        if arr.ndim != 2:
            raise ValueError("A subspace basis must be a 2-d matrix.")

        if tol is not None and arr.shape[1] > 0:
            gram = dagger(arr) @ arr
            deviation = norm(gram - np.eye(arr.shape[1]), 2)
            if deviation > tol.eps_rank:
                raise ValueError(
                    f"Basis columns are not orthonormal (deviation "
                    f"{deviation:.3e})."
                )

        arr.flags.writeable = False
        self.basis = arr
        return

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def is_zero(self) -> bool:
        return self.dim == 0

    @property
    def is_full(self) -> bool:
        return self.dim == self.ambient_dim

    def __repr__(self) -> str:
        return f"<Subspace of dim {self.dim} in C^{self.ambient_dim}>"

    def projector(self) -> np.ndarray:
        return self.basis @ dagger(self.basis)

    @classmethod
    def zero(cls, ambient_dim: int) -> "Subspace":
        return cls(np.zeros((ambient_dim, 0), dtype=DTYPE))

    @classmethod
    def full(cls, ambient_dim: int) -> "Subspace":
        return cls(np.eye(ambient_dim, dtype=DTYPE))

    @classmethod
    def from_vectors(
        cls,
        vectors,
        tol: Tolerance = DEFAULT_TOLERANCE,
    ) -> "Subspace":
        """ The span of some vectors, given as the columns of a matrix.

        The basis is built by Gram-Schmidt, so the first basis vector is
        parallel to the first non-zero input column.
        """

        arr = np.asarray(vectors, dtype=DTYPE)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)

        basis = np.zeros((arr.shape[0], 0), dtype=DTYPE)
        for column in arr.T:
            extension = orthonormalize_extend(basis, column, tol)
            if extension is not None:
                basis = np.column_stack([basis, extension])
        return cls(basis)

    def canonical(self) -> "Subspace":
        """ The same subspace with a basis that depends only on the subspace.

        Runs pivoted Gram-Schmidt over the columns of the projector, taking
        the largest remaining column each time (lowest index on ties). Equal
        subspaces therefore print identically, and coordinate-aligned
        subspaces get coordinate basis vectors.
        """

        if self.is_zero:
            return self

        residuals = self.projector()
        basis = np.zeros((self.ambient_dim, 0), dtype=DTYPE)

        for _ in range(self.dim):
            norms = norm(residuals, axis=0)
            pivot = int(np.argmax(norms >= norms.max() * (1 - 1e-9)))

            vector = residuals[:, pivot].copy()
            vector = vector - basis @ (dagger(basis) @ vector)
            vector = vector / norm(vector)

            basis = np.column_stack([basis, vector])
            residuals -= np.outer(vector, dagger(vector) @ residuals)

        return Subspace(basis)


def _check_dims(x: Subspace, y: Subspace) -> None:
    if x.ambient_dim != y.ambient_dim:
        raise DimensionMismatch(x.ambient_dim, y.ambient_dim, "subspace")
    return


def support(
    rho,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> Subspace:
    """ Span of the eigenvectors of a PSD operator with non-zero eigenvalue.

    Eigenvalues at or below eps_rank * tr(rho) count as zero.
    """

    values, vectors = hermitian_eig(rho, tol)
    if values.size == 0:
        return Subspace.zero(0)

    scale = max(abs(values[0]), abs(values[-1]))
    if values[-1] < -10 * tol.eps_rank * scale:
        raise NotPSD(float(values[-1]), 10 * tol.eps_rank * scale)

    trace = float(np.sum(values))
    if trace <= 0:
        return Subspace.zero(vectors.shape[0])

    keep = values > tol.eps_rank * trace
    return Subspace(vectors[:, keep])


def join(
    x: Subspace,
    y: Subspace,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> Subspace:
    """ The span of x and y. The basis of x is kept as a prefix. """

    _check_dims(x, y)

    if y.is_zero or x.is_full:
        return x

    basis = x.basis
    for column in y.basis.T:
        extension = orthonormalize_extend(basis, column, tol)
        if extension is not None:
            basis = np.column_stack([basis, extension])
    return Subspace(basis)


def complement(
    x: Subspace,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> Subspace:
    """ The orthogonal complement. """

    if x.is_zero:
        return Subspace.full(x.ambient_dim)
    elif x.is_full:
        return Subspace.zero(x.ambient_dim)

    return Subspace(null_space(dagger(x.basis), tol, scale=1.0))


def containment_residual(outer: Subspace, inner: Subspace) -> float:
    """ Largest distance of an inner basis vector from the outer subspace. """

    _check_dims(outer, inner)

    if inner.is_zero:
        return 0.0

    projected = outer.basis @ (dagger(outer.basis) @ inner.basis)
    return float(norm(inner.basis - projected, axis=0).max())


def contains(
    outer: Subspace,
    inner: Subspace,
    tol: Tolerance = DEFAULT_TOLERANCE,
    diagnostics: Optional[Diagnostics] = None,
) -> bool:
    """ Is inner a subspace of outer? """

    residual = containment_residual(outer, inner)
    decision = residual <= tol.eps_contain

    if (
        diagnostics is not None
        and tol.eps_contain / 10 < residual <= tol.eps_contain * 10
    ):
        diagnostics.record(FragileContainment(
            residual,
            tol.eps_contain,
            outer.dim,
            inner.dim,
            decision
        ))

    return decision


def equal(
    x: Subspace,
    y: Subspace,
    tol: Tolerance = DEFAULT_TOLERANCE,
    diagnostics: Optional[Diagnostics] = None,
) -> bool:
    return (
        x.dim == y.dim
        and contains(x, y, tol, diagnostics)
        and contains(y, x, tol, diagnostics)
    )


def intersect(
    x: Subspace,
    y: Subspace,
    tol: Tolerance = DEFAULT_TOLERANCE,
    diagnostics: Optional[Diagnostics] = None,
) -> Subspace:
    """ The intersection, computed as (x^perp v y^perp)^perp.

    The result has a canonical basis (see `Subspace.canonical`).
    """

    _check_dims(x, y)

    if x.is_zero or y.is_zero:
        return Subspace.zero(x.ambient_dim)
    elif contains(y, x, tol, diagnostics):
        return x.canonical()
    elif contains(x, y, tol, diagnostics):
        return y.canonical()

    perp = join(complement(x, tol), complement(y, tol), tol)
    return complement(perp, tol).canonical()


class SubspaceUnion(object):
    """ A finite union of subspaces. No components means {0}. """

    def __init__(
        self,
        ambient_dim: int,
        components: Sequence[Subspace] = (),
    ):
        for c in components:
            if c.ambient_dim != ambient_dim:
                raise DimensionMismatch(
                    ambient_dim,
                    c.ambient_dim,
                    "union component"
                )

        self.ambient_dim = ambient_dim
        self.components: Tuple[Subspace, ...] = tuple(components)
        return

    def __len__(self) -> int:
        return len(self.components)

    def __iter__(self) -> Iterator[Subspace]:
        return iter(self.components)

    def __getitem__(self, i: int) -> Subspace:
        return self.components[i]

    def __repr__(self) -> str:
        dims = ", ".join(str(c.dim) for c in self.components)
        return f"<SubspaceUnion of dims [{dims}] in C^{self.ambient_dim}>"

    @property
    def is_zero(self) -> bool:
        return all(c.is_zero for c in self.components)

    @classmethod
    def of(
        cls,
        ambient_dim: int,
        components: Sequence[Subspace]
    ) -> "SubspaceUnion":
        return cls(ambient_dim, components)


def canonical_indices(
    components: Sequence[Subspace],
    tol: Tolerance = DEFAULT_TOLERANCE,
    diagnostics: Optional[Diagnostics] = None,
) -> List[int]:
    """ Indices of the components that survive canonicalisation.

    Zero components are dropped. A component contained in an earlier
    survivor is dropped; earlier survivors contained in a new component are
    replaced by it. Survivors are returned in the order they were accepted.
    """

    kept: List[int] = []
    for i, component in enumerate(components):
        if component.is_zero:
            continue

        if any(
            contains(components[j], component, tol, diagnostics)
            for j
            in kept
        ):
            continue

        kept = [
            j
            for j
            in kept
            if not contains(component, components[j], tol, diagnostics)
        ]
        kept.append(i)
    return kept


def union_canonicalize(
    u: SubspaceUnion,
    tol: Tolerance = DEFAULT_TOLERANCE,
    diagnostics: Optional[Diagnostics] = None,
) -> SubspaceUnion:
    kept = canonical_indices(u.components, tol, diagnostics)
    return SubspaceUnion.of(u.ambient_dim, [u.components[i] for i in kept])


def union_contains_subspace(
    u: SubspaceUnion,
    p: Subspace,
    tol: Tolerance = DEFAULT_TOLERANCE,
    diagnostics: Optional[Diagnostics] = None,
) -> bool:
    """ Does p lie inside the union?

    A subspace inside a finite union of subspaces lies inside one of them,
    so it is enough to test each component separately.
    """

    if u.ambient_dim != p.ambient_dim:
        raise DimensionMismatch(u.ambient_dim, p.ambient_dim, "subspace")

    if p.is_zero:
        return True

    return any(contains(q, p, tol, diagnostics) for q in u.components)


def union_intersect_subspace(
    u: SubspaceUnion,
    x: Subspace,
    tol: Tolerance = DEFAULT_TOLERANCE,
    diagnostics: Optional[Diagnostics] = None,
) -> SubspaceUnion:
    """ The canonical union of the componentwise intersections with x. """

    if u.ambient_dim != x.ambient_dim:
        raise DimensionMismatch(u.ambient_dim, x.ambient_dim, "subspace")

    parts = [intersect(q, x, tol, diagnostics) for q in u.components]
    return union_canonicalize(
        SubspaceUnion.of(u.ambient_dim, parts),
        tol,
        diagnostics
    )
