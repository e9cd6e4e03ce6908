"""
Diverging pure states.

PD_f is the set of pure states that never halt while running fragment f.
It is a subspace, with PD_epsilon = H_0 = ker M_0 and
PD_{kf} = H_0 ^ T_k^{-1}(PD_f). The states that can diverge under some
infinite schedule form the finite union PD reached when the descending
sequence of unions J_n = {PD_f : |f| = n} stops shrinking.
"""

import logging
from typing import NamedTuple
from typing import List, Optional, Sequence, Tuple

import numpy as np

from qterm.linalg import (
    DEFAULT_TOLERANCE, Tolerance, DimensionMismatch, null_space
)
from qterm.subspaces import (
    Subspace, SubspaceUnion, Diagnostics, intersect, canonical_indices,
    union_contains_subspace
)
from qterm.channels import DensityOperator, preimage_subspace
from qterm.program import (
    Program, ScheduleFragment, min_termination_fragment
)
from qterm.utils import log

logger = logging.getLogger(__name__)

Labelled = List[Tuple[ScheduleFragment, Subspace]]


class IterationCapExceeded(Exception):
    """ The union sequence did not settle within the iteration cap.

    The last two unions are kept so that the caller can inspect how far
    from settled they were.
    """

    def __init__(
        self,
        max_iter: int,
        previous: Labelled,
        current: Labelled,
    ):
        self.max_iter = max_iter
        self.previous = previous
        self.current = current
        self.message = (
            f"Diverging states did not converge within {max_iter} "
            f"iterations (last unions had {len(previous)} and {len(current)} "
            "components)."
        )
        return

    def __str__(self) -> str:
        return self.message


class DivergenceResult(NamedTuple):

    pd: SubspaceUnion
    iterations: int
    fragment_labels: List[ScheduleFragment]
    converged: bool
    diagnostics: Diagnostics


def h_zero_subspace(
    program: Program,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> Subspace:
    """ H_0 = ker M_0, the states that never halt at the first check. """

    m0 = program.measurement.m0
    return Subspace(null_space(m0, tol, scale=1.0)).canonical()


def _pd_pair(
    program: Program,
    h0: Subspace,
    k: int,
    label: ScheduleFragment,
    p: Subspace,
    tol: Tolerance,
) -> Tuple[ScheduleFragment, Subspace, Diagnostics]:
    local = Diagnostics()
    transition = program.transitions[k - 1]
    pre = preimage_subspace(transition, p, tol)
    return (
        ScheduleFragment((k,)) + label,
        intersect(h0, pre, tol, local),
        local
    )


def pd_step_raw(
    program: Program,
    j_prev: Labelled,
    tol: Tolerance = DEFAULT_TOLERANCE,
    h0: Optional[Subspace] = None,
    n_jobs: int = 1,
    diagnostics: Optional[Diagnostics] = None,
) -> Labelled:
    """ All PD_{kf} = H_0 ^ T_k^{-1}(PD_f) for (f, PD_f) in j_prev.

    Results are ordered by component of j_prev first, then by k.
    """

    if h0 is None:
        h0 = h_zero_subspace(program, tol)

    for _, p in j_prev:
        if p.ambient_dim != program.dim:
            raise DimensionMismatch(program.dim, p.ambient_dim, "subspace")

    tasks = [
        (k, label, p)
        for label, p
        in j_prev
        for k
        in range(1, program.nprocesses + 1)
    ]

    if n_jobs == 1 or len(tasks) < 2:
        results = [
            _pd_pair(program, h0, k, label, p, tol)
            for k, label, p
            in tasks
        ]
    else:
        from joblib import Parallel, delayed

        # Results come back in task order regardless of scheduling.
        results = Parallel(n_jobs=n_jobs, prefer="threads")(
            delayed(_pd_pair)(program, h0, k, label, p, tol)
            for k, label, p
            in tasks
        )

    if diagnostics is not None:
        for _, _, local in results:
            diagnostics.extend(local)

    return [(label, component) for label, component, _ in results]


def _canonical_labelled(
    components: Labelled,
    tol: Tolerance,
    diagnostics: Optional[Diagnostics],
) -> Labelled:
    kept = canonical_indices([c for _, c in components], tol, diagnostics)
    return [components[i] for i in kept]


def pd_step(
    program: Program,
    j_prev: SubspaceUnion,
    tol: Tolerance = DEFAULT_TOLERANCE,
    n_jobs: int = 1,
    diagnostics: Optional[Diagnostics] = None,
) -> SubspaceUnion:
    """ One refinement of the diverging union, canonicalised.

    Every component of the result lies in H_0 and in some component of
    j_prev.
    """

    if j_prev.ambient_dim != program.dim:
        raise DimensionMismatch(program.dim, j_prev.ambient_dim, "union")

    labelled = [(ScheduleFragment(), p) for p in j_prev]
    raw = pd_step_raw(
        program,
        labelled,
        tol,
        n_jobs=n_jobs,
        diagnostics=diagnostics
    )
    kept = _canonical_labelled(raw, tol, diagnostics)
    return SubspaceUnion.of(program.dim, [c for _, c in kept])


def _settled(
    previous: Labelled,
    current: Labelled,
    tol: Tolerance,
    diagnostics: Diagnostics,
    dim: int,
) -> bool:
    union = SubspaceUnion.of(dim, [c for _, c in current])
    return all(
        union_contains_subspace(union, p, tol, diagnostics)
        for _, p
        in previous
    )


@log(logger, logging.DEBUG)
def diverging_states(
    program: Program,
    tol: Tolerance = DEFAULT_TOLERANCE,
    max_iter: int = 64,
    n_jobs: int = 1,
    diagnostics: Optional[Diagnostics] = None,
) -> DivergenceResult:
    """ Compute the diverging pure states PD as a finite union of subspaces.

    Keyword arguments:
    program -- The program.
    tol -- Tolerances.
    max_iter -- Refinement steps allowed before IterationCapExceeded.
    n_jobs -- Threads used for the preimages within one step.
    diagnostics -- Collector for borderline containment decisions. A new
        one is created if not given.

    Returns:
    DivergenceResult -- PD, with the fragment labelling each component and
        the number of refinement steps taken.
    """

    if max_iter < 1:
        raise ValueError("max_iter must be at least 1.")

    if diagnostics is None:
        diagnostics = Diagnostics()

    h0 = h_zero_subspace(program, tol)

    previous: Labelled = []
    if not h0.is_zero:
        previous = [(ScheduleFragment(), h0)]

    last: Labelled = []
    iterations = 0
    while True:
        if iterations >= max_iter:
            raise IterationCapExceeded(max_iter, last, previous)

        current = _canonical_labelled(
            pd_step_raw(program, previous, tol, h0, n_jobs, diagnostics),
            tol,
            diagnostics
        )
        iterations += 1

        logger.debug(
            "Iteration %d: %d components of dimensions %s.",
            iterations,
            len(current),
            [c.dim for _, c in current]
        )

        if _settled(previous, current, tol, diagnostics, program.dim):
            break

        last = previous
        previous = current

    logger.info(
        "Diverging states settled after %d iterations with %d components.",
        iterations,
        len(previous)
    )

    return DivergenceResult(
        pd=SubspaceUnion.of(program.dim, [c for _, c in previous]),
        iterations=iterations,
        fragment_labels=[f for f, _ in previous],
        converged=True,
        diagnostics=diagnostics,
    )


def pd_of_fragment(
    program: Program,
    f: ScheduleFragment,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> Subspace:
    """ PD_f evaluated directly, peeling indices off the front of f. """

    f.check(program.nprocesses)
    h0 = h_zero_subspace(program, tol)

    current = h0
    for k in reversed(list(f)):
        pre = preimage_subspace(program.transitions[k - 1], current, tol)
        current = intersect(h0, pre, tol)
    return current


def pd_membership_oracle(
    program: Program,
    psi: Sequence[complex],
    depth: int,
    tol: Tolerance = DEFAULT_TOLERANCE,
    search_cap: int = 1_000_000,
    n_jobs: int = 1,
) -> bool:
    """ Is there a fragment of length depth that psi survives?

    Exhaustive over all m^depth fragments, with early exit. Every state
    in PD passes at every depth, and the test becomes exact as depth
    grows.
    """

    vector = np.asarray(psi, dtype=complex).reshape(-1)
    size = np.linalg.norm(vector)
    if abs(size - 1) > 1e-6:
        raise ValueError(f"psi must be a unit vector, it has norm {size}.")

    rho = DensityOperator.from_pure(vector / size, tol)
    result = min_termination_fragment(
        program,
        rho,
        depth,
        search_cap=search_cap,
        stop_below=tol.eps_prob,
        n_jobs=n_jobs,
    )
    return result.probability <= tol.eps_prob
