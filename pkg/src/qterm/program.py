"""
Nondeterministic quantum programs.

A program is a list of trace-preserving processes E_1..E_m sharing a
termination measurement {M_0, M_1}. Each step first measures; outcome 0
halts, outcome 1 continues with the process picked by the scheduler. One
continue-then-step of process i is the transition T_i(rho) =
E_i(M_1 rho M_1^dagger).

Process indices are 1-based in every public interface.
"""

import itertools
import logging
from typing import NamedTuple
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from qterm.linalg import DEFAULT_TOLERANCE, Tolerance, DimensionMismatch
from qterm.channels import (
    SuperOperator, Measurement, DensityOperator, InvalidChannel,
    apply_operator
)

logger = logging.getLogger(__name__)


class IndexOutOfRange(Exception):

    def __init__(self, index: int, nprocesses: Optional[int]):
        self.index = index
        self.nprocesses = nprocesses
        if nprocesses is None:
            self.message = f"Process index {index} must be at least 1."
        else:
            self.message = (
                f"Process index {index} is outside of 1..{nprocesses}."
            )
        return

    def __str__(self) -> str:
        return self.message


class SearchSpaceTooLarge(Exception):

    def __init__(self, size: int, cap: int):
        self.size = size
        self.cap = cap
        self.message = (
            f"Exhaustive search would visit {size} fragments, which exceeds "
            f"the configured cap of {cap}."
        )
        return

    def __str__(self) -> str:
        return self.message


class FragmentCalculusError(Exception):
    """ The summed and closed forms of a termination probability differ. """

    def __init__(self, summed: float, closed: float, threshold: float):
        self.summed = summed
        self.closed = closed
        self.threshold = threshold
        self.message = (
            f"Termination probability is inconsistent: summed {summed!r} vs "
            f"closed form {closed!r} (allowed difference {threshold:.3e})."
        )
        return

    def __str__(self) -> str:
        return self.message


class ScheduleFragment(object):
    """ A finite sequence of process indices. The empty fragment is epsilon.
    """

    def __init__(self, indices: Sequence[int] = ()):
        ints = tuple(int(i) for i in indices)
        for i in ints:
            if i < 1:
                raise IndexOutOfRange(i, None)

        self.indices: Tuple[int, ...] = ints
        return

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices)

    def __eq__(self, other) -> bool:
        if isinstance(other, ScheduleFragment):
            return self.indices == other.indices
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.indices)

    def __add__(self, other: "ScheduleFragment") -> "ScheduleFragment":
        return ScheduleFragment(self.indices + other.indices)

    def __str__(self) -> str:
        if all(i < 10 for i in self.indices):
            return "".join(str(i) for i in self.indices)
        return ",".join(str(i) for i in self.indices)

    def __repr__(self) -> str:
        return f"ScheduleFragment('{self}')"

    def prefix(self, n: int) -> "ScheduleFragment":
        """ f(<=n), the first n indices. """
        return ScheduleFragment(self.indices[:max(n, 0)])

    def suffix(self, n: int) -> "ScheduleFragment":
        """ f(>n), everything after the first n indices. """
        return ScheduleFragment(self.indices[max(n, 0):])

    def check(self, nprocesses: int) -> "ScheduleFragment":
        for i in self.indices:
            if i > nprocesses:
                raise IndexOutOfRange(i, nprocesses)
        return self

    @classmethod
    def from_string(cls, s: str) -> "ScheduleFragment":
        """ Parse "1212" or "1,2,1,2". An empty string is epsilon. """

        s = s.strip()
        if s in ("", "e", "eps", "epsilon"):
            return cls()

        if "," in s:
            tokens = [t.strip() for t in s.split(",")]
        else:
            tokens = list(s)

        if not all(t.isdigit() for t in tokens):
            raise ValueError(f"Invalid schedule fragment '{s}'.")

        return cls(int(t) for t in tokens)


class TransitionOp(SuperOperator):
    """ T_i(rho) = E_i(M_1 rho M_1^dagger), Kraus elements E_ij M_1. """

    def __init__(
        self,
        process: SuperOperator,
        measurement: Measurement,
        index: int,
        tol: Tolerance = DEFAULT_TOLERANCE,
    ):
        self.index = index
        super().__init__(
            [k @ measurement.m1 for k in process.kraus],
            trace_preserving=False,
            tol=tol,
        )
        return


class Program(object):
    """ A nondeterministic quantum program ({E_1, ..., E_m}, {M_0, M_1}). """

    def __init__(
        self,
        processes: Sequence[SuperOperator],
        measurement: Measurement,
        tol: Tolerance = DEFAULT_TOLERANCE,
    ):
        if len(processes) == 0:
            raise InvalidChannel("A program needs at least one process.")

        for i, process in enumerate(processes, 1):
            if process.dim != measurement.dim:
                raise DimensionMismatch(
                    measurement.dim,
                    process.dim,
                    f"process {i}"
                )

            if not process.trace_preserving or process.heisenberg:
                raise InvalidChannel(
                    f"Process {i} must be a trace preserving super-operator."
                )

        self.processes: Tuple[SuperOperator, ...] = tuple(processes)
        self.measurement = measurement
        self.tol = tol

        self.transitions: Tuple[TransitionOp, ...] = tuple(
            TransitionOp(p, measurement, i, tol)
            for i, p
            in enumerate(self.processes, 1)
        )
        return

    @property
    def dim(self) -> int:
        return self.measurement.dim

    @property
    def nprocesses(self) -> int:
        return len(self.processes)

    @property
    def defect(self) -> float:
        """ Largest deviation from exact trace preservation / completeness.
        """
        return max(
            [self.measurement.defect] + [p.defect for p in self.processes]
        )

    def __repr__(self) -> str:
        return f"<Program dim={self.dim} processes={self.nprocesses}>"

    @classmethod
    def from_kraus(
        cls,
        kraus_sets: Sequence[Sequence],
        m0,
        m1,
        tol: Tolerance = DEFAULT_TOLERANCE,
    ) -> "Program":
        processes = [SuperOperator(ks, tol=tol) for ks in kraus_sets]
        return cls(processes, Measurement(m0, m1, tol), tol)


def transition(program: Program, i: int) -> TransitionOp:
    """ The transition super-operator T_i for 1-based process index i. """

    if not (1 <= i <= program.nprocesses):
        raise IndexOutOfRange(i, program.nprocesses)
    return program.transitions[i - 1]


def halting_mass(program: Program, state: np.ndarray) -> float:
    """ tr(M_0 state M_0^dagger) """
    m0 = program.measurement.m0
    return float(np.real(np.einsum("ij,jk,ik->", m0, state, m0.conj())))


def continuing_mass(program: Program, state: np.ndarray) -> float:
    """ tr(M_1 state M_1^dagger) """
    m1 = program.measurement.m1
    return float(np.real(np.einsum("ij,jk,ik->", m1, state, m1.conj())))


def _check_state(program: Program, rho: DensityOperator) -> None:
    if rho.dim != program.dim:
        raise DimensionMismatch(program.dim, rho.dim, "state")
    return


def run_fragment(
    program: Program,
    f: ScheduleFragment,
    rho: DensityOperator,
) -> DensityOperator:
    """ T_f(rho) = T_{s_n} o ... o T_{s_1}(rho); T_epsilon is the identity.
    """

    f.check(program.nprocesses)
    _check_state(program, rho)

    state = rho.matrix
    for i in f:
        state = apply_operator(program.transitions[i - 1], state)
    return DensityOperator(state, validate=False)


def termination_prob_fragment(
    program: Program,
    f: ScheduleFragment,
    rho: DensityOperator,
) -> float:
    """ Probability that the program halts while running fragment f.

    t_f(rho) = sum_{n=0}^{|f|} tr(M_0 T_{f(<=n)}(rho) M_0^dagger), which
    also equals tr(rho) - tr(M_1 T_f(rho) M_1^dagger). Both forms are
    evaluated; a disagreement larger than the program's own rounding
    defect raises FragmentCalculusError.
    """

    f.check(program.nprocesses)
    _check_state(program, rho)

    state = rho.matrix
    summed = halting_mass(program, state)
    for i in f:
        state = apply_operator(program.transitions[i - 1], state)
        summed += halting_mass(program, state)

    closed = rho.trace - continuing_mass(program, state)

    threshold = 1e-10 + (len(f) + 1) * program.defect * max(rho.trace, 1.0)
    if abs(summed - closed) > threshold:
        raise FragmentCalculusError(summed, closed, threshold)
    return max(0.0, summed)


def average_program(program: Program) -> Program:
    """ The deterministic program whose single process is the arithmetic
    mean of the processes, with Kraus elements E_ij / sqrt(m).
    """

    m = program.nprocesses
    if m == 1:
        return program

    scale = 1 / np.sqrt(m)
    kraus = [k * scale for p in program.processes for k in p.kraus]
    averaged = SuperOperator(kraus, trace_preserving=True, tol=program.tol)
    return Program([averaged], program.measurement, program.tol)


def fragments(nprocesses: int, length: int) -> Iterator[ScheduleFragment]:
    """ All fragments of the given length in lexicographic order. """

    for indices in itertools.product(range(1, nprocesses + 1), repeat=length):
        yield ScheduleFragment(indices)


class FragmentSearchResult(NamedTuple):

    probability: float
    fragment: ScheduleFragment
    nodes: int


def _branch_and_bound(
    program: Program,
    root: Tuple[int, ...],
    state: np.ndarray,
    probability: float,
    length: int,
    stop_below: Optional[float],
) -> Tuple[float, Optional[Tuple[int, ...]], int]:
    """ Depth first search for the fragment minimising t_f.

    Extending a fragment can only add halting probability, so a prefix
    whose t already reaches the incumbent cannot lead to a better one.
    Children are visited in ascending process order and only strictly
    better leaves replace the incumbent, so the lexicographically first
    minimiser wins.
    """

    best_prob = np.inf
    best: Optional[Tuple[int, ...]] = None
    nodes = 0

    stack: List[Tuple[Tuple[int, ...], np.ndarray, float]] = [
        (root, state, probability)
    ]

    while len(stack) > 0:
        indices, current, prob = stack.pop()
        nodes += 1

        if prob >= best_prob:
            continue

        if len(indices) == length:
            best_prob = prob
            best = indices
            if stop_below is not None and best_prob <= stop_below:
                break
            continue

        # Pushed in reverse so that process 1 is explored first.
        for k in range(program.nprocesses, 0, -1):
            child = apply_operator(program.transitions[k - 1], current)
            stack.append((
                indices + (k,),
                child,
                prob + halting_mass(program, child)
            ))

    return float(best_prob), best, nodes


def min_termination_fragment(
    program: Program,
    rho: DensityOperator,
    length: int,
    search_cap: int = 1_000_000,
    stop_below: Optional[float] = None,
    n_jobs: int = 1,
) -> FragmentSearchResult:
    """ The fragment f with |f| = length minimising t_f(rho).

    Keyword arguments:
    program -- The program.
    rho -- The initial state.
    length -- Length of the fragments to search.
    search_cap -- Refuse searches with more than this many leaves.
    stop_below -- Stop as soon as a fragment with t_f at or below this value
        is found.
    n_jobs -- Number of threads to spread the first-step branches over.

    Returns:
    FragmentSearchResult -- The minimum, the lexicographically first fragment
        attaining it and the number of search nodes visited.
    """

    _check_state(program, rho)
    if length < 0:
        raise ValueError("Fragment length must not be negative.")

    size = program.nprocesses ** length
    if size > search_cap:
        raise SearchSpaceTooLarge(size, search_cap)

    start = halting_mass(program, rho.matrix)

    if length == 0 or n_jobs == 1:
        prob, best, nodes = _branch_and_bound(
            program,
            (),
            rho.matrix,
            start,
            length,
            stop_below
        )
    else:
        from joblib import Parallel, delayed

        def branch(k: int):
            child = apply_operator(program.transitions[k - 1], rho.matrix)
            return _branch_and_bound(
                program,
                (k,),
                child,
                start + halting_mass(program, child),
                length,
                stop_below,
            )

        results = Parallel(n_jobs=n_jobs, prefer="threads")(
            delayed(branch)(k) for k in range(1, program.nprocesses + 1)
        )

        # min is stable, so ties go to the smallest first process.
        prob, best, nodes = min(results, key=lambda r: r[0])
        nodes = 1 + sum(r[2] for r in results)

    assert best is not None
    return FragmentSearchResult(prob, ScheduleFragment(best), nodes)
