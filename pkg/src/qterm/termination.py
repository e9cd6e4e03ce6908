"""
Termination verdicts, witnesses and schedules.

A state terminates with probability one under every schedule exactly when
its reachable space meets the diverging pure states only in zero. When it
does not, a unit vector in the intersection is a witness, and a schedule
that keeps it inside the diverging states forever shows that it never
halts.
"""

import logging
from typing import NamedTuple
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from qterm.linalg import (
    DTYPE, DEFAULT_TOLERANCE, Tolerance, DimensionMismatch
)
from qterm.subspaces import (
    Subspace, SubspaceUnion, Diagnostics, support,
    union_contains_subspace, union_intersect_subspace
)
from qterm.channels import DensityOperator, InvalidState, apply_operator
from qterm.program import (
    Program, ScheduleFragment, average_program, halting_mass,
    min_termination_fragment, termination_prob_fragment
)
from qterm.reachability import reachable_space
from qterm.divergence import diverging_states
from qterm.utils import log

logger = logging.getLogger(__name__)


class NoDivergingStep(Exception):
    """ No process keeps the current state inside the diverging states. """

    def __init__(self, step: int, partial: ScheduleFragment):
        self.step = step
        self.partial = partial
        if step == 0:
            self.message = (
                "The state is not inside the diverging pure states, so no "
                "diverging schedule can be built from it."
            )
        else:
            self.message = (
                f"No process keeps the state diverging at step {step} "
                f"(schedule so far '{partial}')."
            )
        return

    def __str__(self) -> str:
        return self.message


class InvalidSchedule(Exception):

    def __init__(self, token: str, message: str):
        self.token = token
        self.message = message
        return

    def __str__(self) -> str:
        return self.message


class Verdict(NamedTuple):
    """ The outcome of a termination check.

    The witness fields are set exactly when terminating is False.
    """

    terminating: bool
    reachable: Subspace
    pd: SubspaceUnion
    intersection: SubspaceUnion
    witness_vector: Optional[np.ndarray]
    witness_schedule: Optional[ScheduleFragment]
    witness_probability: Optional[float]
    pd_labels: List[ScheduleFragment]
    iterations: int
    diagnostics: Diagnostics


class SimulationStep(NamedTuple):
    """ The state after the first `step` transitions of a schedule.

    trace is tr(T_{f(<=step)}(rho)), the mass not yet halted before the
    check at this step. cumulative is t_{f(<=step)}(rho), the probability
    of having halted at or before that check.
    """

    step: int
    trace: float
    cumulative: float


def _unit(psi: Sequence[complex]) -> np.ndarray:
    vector = np.asarray(psi, dtype=DTYPE).reshape(-1)
    size = np.linalg.norm(vector)
    if size == 0:
        raise InvalidState("The zero vector is not a state.")
    return vector / size


@log(logger, logging.DEBUG)
def adversarial_schedule(
    program: Program,
    psi: Sequence[complex],
    pd: SubspaceUnion,
    horizon: int = 200,
    tol: Tolerance = DEFAULT_TOLERANCE,
    diagnostics: Optional[Diagnostics] = None,
) -> ScheduleFragment:
    """ A schedule of length horizon that never lets psi halt.

    At each step the smallest process index k is chosen such that the
    support of T_k(state) stays inside a component of pd.
    """

    vector = _unit(psi)
    if vector.shape[0] != program.dim:
        raise DimensionMismatch(program.dim, vector.shape[0], "vector")

    start = Subspace.from_vectors(vector, tol)
    if not union_contains_subspace(pd, start, tol, diagnostics):
        raise NoDivergingStep(0, ScheduleFragment())

    state = np.outer(vector, vector.conj())
    chosen: List[int] = []

    for step in range(1, horizon + 1):
        for k in range(1, program.nprocesses + 1):
            following = apply_operator(program.transitions[k - 1], state)
            supp = support(following, tol)
            if (
                not supp.is_zero
                and union_contains_subspace(pd, supp, tol, diagnostics)
            ):
                chosen.append(k)
                state = following
                break
        else:
            raise NoDivergingStep(step, ScheduleFragment(chosen))

    schedule = ScheduleFragment(chosen)

    rho = DensityOperator.from_pure(vector, tol)
    probability = termination_prob_fragment(program, schedule, rho)
    if probability > horizon * tol.eps_prob:
        logger.warning(
            "Witness schedule halts with probability %.3e, above the "
            "expected bound %.3e.",
            probability,
            horizon * tol.eps_prob
        )
    return schedule


@log(logger, logging.DEBUG)
def check_termination(
    program: Program,
    rho: DensityOperator,
    tol: Tolerance = DEFAULT_TOLERANCE,
    max_iter: int = 64,
    horizon: int = 200,
    n_jobs: int = 1,
) -> Verdict:
    """ Decide whether rho halts with probability one under every schedule.

    Keyword arguments:
    program -- The program.
    rho -- The initial state, with trace one.
    tol -- Tolerances.
    max_iter -- Iteration cap for the diverging states.
    horizon -- Length of the witness schedule, if there is one.
    n_jobs -- Threads used while computing the diverging states.

    Returns:
    Verdict -- The decision with the reachable space, the diverging states
        and their intersection. Non-terminating verdicts carry a witness.
    """

    if rho.dim != program.dim:
        raise DimensionMismatch(program.dim, rho.dim, "state")

    if abs(rho.trace - 1) > tol.eps_prob:
        raise InvalidState(
            f"The initial state must have trace 1, it has {rho.trace:.12g}."
        )

    diagnostics = Diagnostics()
    reachable = reachable_space(program, rho, tol)
    divergence = diverging_states(
        program,
        tol,
        max_iter=max_iter,
        n_jobs=n_jobs,
        diagnostics=diagnostics
    )

    intersection = union_intersect_subspace(
        divergence.pd,
        reachable,
        tol,
        diagnostics
    )

    terminating = intersection.is_zero
    witness_vector = None
    witness_schedule = None
    witness_probability = None

    if not terminating:
        witness_vector = np.array(intersection[0].basis[:, 0], copy=True)
        witness_schedule = adversarial_schedule(
            program,
            witness_vector,
            divergence.pd,
            horizon,
            tol,
            diagnostics
        )
        witness_probability = termination_prob_fragment(
            program,
            witness_schedule,
            DensityOperator.from_pure(witness_vector, tol)
        )

    logger.info(
        "Verdict: %s.",
        "terminating" if terminating else "not terminating"
    )

    return Verdict(
        terminating=terminating,
        reachable=reachable,
        pd=divergence.pd,
        intersection=intersection,
        witness_vector=witness_vector,
        witness_schedule=witness_schedule,
        witness_probability=witness_probability,
        pd_labels=divergence.fragment_labels,
        iterations=divergence.iterations,
        diagnostics=diagnostics,
    )


def infimum_lower_bound(
    program: Program,
    rho: DensityOperator,
    length: int,
    search_cap: int = 1_000_000,
    n_jobs: int = 1,
) -> float:
    """ min t_f(rho) over all fragments of the given length.

    No schedule can halt with less probability than this, and the bound
    never decreases as the length grows.
    """

    return min_termination_fragment(
        program,
        rho,
        length,
        search_cap=search_cap,
        n_jobs=n_jobs
    ).probability


def greedy_schedule(
    program: Program,
    rho: DensityOperator,
    length: int,
) -> ScheduleFragment:
    """ The myopic scheduler: each step takes the process whose result is
    least likely to halt at the next check, smallest index on ties.
    """

    if rho.dim != program.dim:
        raise DimensionMismatch(program.dim, rho.dim, "state")

    state = rho.matrix
    chosen: List[int] = []
    for _ in range(length):
        best_k = 1
        best_state = apply_operator(program.transitions[0], state)
        best = halting_mass(program, best_state)

        for k in range(2, program.nprocesses + 1):
            following = apply_operator(program.transitions[k - 1], state)
            value = halting_mass(program, following)
            if value < best - 1e-15:
                best_k, best, best_state = k, value, following

        chosen.append(best_k)
        state = best_state

    return ScheduleFragment(chosen)


def resolve_schedule(
    program: Program,
    token: Union[str, ScheduleFragment],
    rho: DensityOperator,
    horizon: int = 200,
) -> Tuple[Program, ScheduleFragment]:
    """ Turn a schedule description into a program and a fragment to run.

    Keyword arguments:
    program -- The program.
    token -- An explicit fragment ("1212" or "1,2,1,2"), "greedy" for the
        myopic scheduler run for horizon steps, or "uniform:N" for N steps
        of the average program.
    rho -- The initial state, needed by the greedy scheduler.
    horizon -- Length of greedy schedules.

    Returns:
    Program -- The program the fragment refers to.
    ScheduleFragment -- The fragment.
    """

    if isinstance(token, ScheduleFragment):
        return program, token.check(program.nprocesses)

    text = token.strip()

    if text == "greedy":
        return program, greedy_schedule(program, rho, horizon)

    if text.startswith("uniform:"):
        count = text[len("uniform:"):]
        if not count.isdigit():
            raise InvalidSchedule(
                token,
                f"Invalid step count in schedule '{token}'."
            )
        return average_program(program), ScheduleFragment([1] * int(count))

    try:
        fragment = ScheduleFragment.from_string(text)
    except ValueError:
        raise InvalidSchedule(
            token,
            f"Unknown schedule '{token}'. Expected a sequence of process "
            "indices, 'greedy' or 'uniform:N'."
        )

    if len(fragment) > 0 and max(fragment) > program.nprocesses:
        raise InvalidSchedule(
            token,
            f"Schedule '{token}' uses process {max(fragment)} but the program "
            f"only has {program.nprocesses}."
        )
    return program, fragment


def simulate(
    program: Program,
    f: ScheduleFragment,
    rho: DensityOperator,
) -> List[SimulationStep]:
    """ Run a fragment step by step, recording |f| + 1 checks.

    The final cumulative value is t_f(rho).
    """

    f.check(program.nprocesses)
    if rho.dim != program.dim:
        raise DimensionMismatch(program.dim, rho.dim, "state")

    state = rho.matrix
    cumulative = halting_mass(program, state)
    steps = [SimulationStep(0, rho.trace, cumulative)]

    for n, i in enumerate(f, 1):
        state = apply_operator(program.transitions[i - 1], state)
        cumulative += halting_mass(program, state)
        steps.append(SimulationStep(
            n,
            float(np.real(np.trace(state))),
            cumulative
        ))

    return steps
