"""
The reachable space of a program from an initial state.

Every process contributes equally to the average transition, so the
reachable space of the nondeterministic program equals that of its average
program. The worklist algorithm below runs on the Kraus elements of the
average transition.
"""

import logging
from typing import NamedTuple
from typing import List, Tuple

import numpy as np

from qterm.linalg import (
    DTYPE, DEFAULT_TOLERANCE, Tolerance, DimensionMismatch,
    orthonormalize_extend
)
from qterm.subspaces import Subspace, support, join
from qterm.channels import DensityOperator, image_subspace
from qterm.program import Program, TransitionOp, average_program
from qterm.utils import log

logger = logging.getLogger(__name__)


class ReachableTrace(NamedTuple):
    """ The reachable space and how it was found.

    insertions holds one (i, j) pair per basis vector added by the
    worklist, meaning E_j |b_i> contributed it. Indices are 0-based.
    """

    space: Subspace
    insertions: List[Tuple[int, int]]
    residual_computations: int


def average_transition(program: Program) -> TransitionOp:
    """ T-bar, with Kraus elements E_ij M_1 / sqrt(m). """
    return average_program(program).transitions[0]


@log(logger, logging.DEBUG)
def reachable_basis_trace(
    program: Program,
    rho: DensityOperator,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> ReachableTrace:
    """ Worklist construction of an orthonormal basis of the reachable space.

    Starts from a basis of supp(rho). Basis vectors are visited in the
    order they were added, and each is mapped through every Kraus element
    of the average transition in ascending order. Images with a residual
    against the current basis are orthonormalised and appended.
    """

    if rho.dim != program.dim:
        raise DimensionMismatch(program.dim, rho.dim, "state")

    kraus = average_transition(program).kraus
    basis = np.array(support(rho.matrix, tol).basis, dtype=DTYPE)

    insertions: List[Tuple[int, int]] = []
    computations = 0

    i = 0
    while i < basis.shape[1]:
        if basis.shape[1] == program.dim:
            break

        vector = basis[:, i]
        for j, k in enumerate(kraus):
            computations += 1
            extension = orthonormalize_extend(basis, k @ vector, tol)
            if extension is None:
                continue

            basis = np.column_stack([basis, extension])
            insertions.append((i, j))
            logger.debug(
                "Basis vector %d from Kraus element %d applied to vector %d.",
                basis.shape[1] - 1, j, i
            )

            if basis.shape[1] == program.dim:
                break
        i += 1

    logger.info("Reachable space has dimension %d.", basis.shape[1])
    return ReachableTrace(Subspace(basis), insertions, computations)


def reachable_space(
    program: Program,
    rho: DensityOperator,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> Subspace:
    return reachable_basis_trace(program, rho, tol).space


def fixpoint_chain(
    program: Program,
    rho: DensityOperator,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> List[Subspace]:
    """ The increasing chain X_0 = supp(rho), X_{n+1} = X_n v T-bar(X_n).

    The chain stops at the first X_n whose successor has the same
    dimension, so the last element is the fixpoint and len(chain) - 1 is
    the number of growing steps.
    """

    if rho.dim != program.dim:
        raise DimensionMismatch(program.dim, rho.dim, "state")

    tbar = average_transition(program)
    chain = [support(rho.matrix, tol)]

    # Each step adds at least one dimension, so d + 1 rounds suffice.
    for _ in range(program.dim + 1):
        current = chain[-1]
        following = join(current, image_subspace(tbar, current, tol), tol)
        if following.dim == current.dim:
            break
        chain.append(following)

    return chain


def reachable_space_fixpoint_oracle(
    program: Program,
    rho: DensityOperator,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> Subspace:
    return fixpoint_chain(program, rho, tol)[-1]
