import itertools

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_almost_equal

from hypothesis import given, settings, strategies as st

from qterm.subspaces import Subspace, SubspaceUnion, union_contains_subspace
from qterm.channels import SuperOperator, Measurement, DensityOperator
from qterm.channels import InvalidState
from qterm.program import Program, ScheduleFragment
from qterm.program import termination_prob_fragment, run_fragment, fragments
from qterm.divergence import diverging_states
from qterm.termination import (
    NoDivergingStep, InvalidSchedule, check_termination,
    adversarial_schedule, infimum_lower_bound, greedy_schedule,
    resolve_schedule, simulate
)
from qterm.walks import build_example, vertex_state

E = np.eye(4)


def test_c4_not_terminating():
    program = build_example("c4-nondet")
    verdict = check_termination(program, vertex_state(0), horizon=20)

    assert not verdict.terminating
    assert verdict.reachable.is_full
    assert verdict.iterations == 2
    assert [str(f) for f in verdict.pd_labels] == ["1", "2"]

    home = Subspace.from_vectors(E[0])
    assert union_contains_subspace(verdict.intersection, home)

    assert_allclose(np.abs(verdict.witness_vector), E[0], atol=1e-9)
    assert str(verdict.witness_schedule) == "12" * 10
    assert verdict.witness_probability < 1e-10
    return


@pytest.mark.parametrize("name", ["c4-w1", "c4-w2"])
def test_single_walk_terminates(name):
    program = build_example(name)
    verdict = check_termination(program, vertex_state(0))

    assert verdict.terminating
    assert verdict.pd.is_zero
    assert verdict.intersection.is_zero
    assert verdict.witness_vector is None
    assert verdict.witness_schedule is None
    assert verdict.witness_probability is None
    return


def test_always_halting_program_terminates():
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    program = Program(
        [SuperOperator.unitary(x)],
        Measurement(np.eye(2), np.zeros((2, 2)))
    )
    rho = DensityOperator(np.diag([0.5, 0.5]))
    assert check_termination(program, rho).terminating
    return


def test_check_requires_unit_trace():
    program = build_example("c4-nondet")
    rho = DensityOperator(np.diag([0.5, 0.0, 0.0, 0.0]))
    with pytest.raises(InvalidState):
        check_termination(program, rho)
    return


def test_adversarial_schedule_c4():
    program = build_example("c4-nondet")
    pd = diverging_states(program).pd

    schedule = adversarial_schedule(program, E[0], pd, horizon=6)
    assert str(schedule) == "121212"
    assert termination_prob_fragment(
        program,
        schedule,
        vertex_state(0)
    ) < 1e-12
    return


def test_adversarial_schedule_outside_pd():
    program = build_example("c4-nondet")
    pd = diverging_states(program).pd

    with pytest.raises(NoDivergingStep) as info:
        adversarial_schedule(program, E[2], pd, horizon=6)
    assert info.value.step == 0

    with pytest.raises(NoDivergingStep):
        adversarial_schedule(program, E[0], SubspaceUnion(4), horizon=6)
    return


def test_adversarial_schedule_gets_stuck():
    program = build_example("c4-nondet")

    # |0> is inside, but no step keeps W|0> inside span{|0>}.
    pd = SubspaceUnion.of(4, [Subspace.from_vectors(E[0])])
    with pytest.raises(NoDivergingStep) as info:
        adversarial_schedule(program, E[0], pd, horizon=6)
    assert info.value.step == 1
    assert len(info.value.partial) == 0
    return


@pytest.mark.parametrize("length", [0, 1, 4, 8])
def test_infimum_c4(length):
    program = build_example("c4-nondet")
    assert infimum_lower_bound(program, vertex_state(0), length) < 1e-12
    return


def test_infimum_single_walk():
    program = build_example("c4-w1")
    rho = vertex_state(0)
    bound = infimum_lower_bound(program, rho, 8)
    direct = termination_prob_fragment(
        program,
        ScheduleFragment([1] * 8),
        rho
    )
    assert_almost_equal(bound, direct)
    assert 0 < bound < 1
    return


def test_infimum_length_zero_is_first_check():
    program = build_example("c4-nondet")
    rho = DensityOperator(np.diag([0.25, 0.25, 0.25, 0.25]))
    assert_almost_equal(infimum_lower_bound(program, rho, 0), 0.25)
    return


def test_greedy_schedule_c4():
    program = build_example("c4-nondet")
    schedule = greedy_schedule(program, vertex_state(0), 8)
    assert str(schedule) == "12121212"
    assert greedy_schedule(program, vertex_state(0), 0) == ScheduleFragment()
    return


def test_resolve_schedule():
    program = build_example("c4-nondet")
    rho = vertex_state(0)

    same, f = resolve_schedule(program, "1,2,1", rho)
    assert same is program
    assert f == ScheduleFragment([1, 2, 1])

    same, f = resolve_schedule(program, "greedy", rho, horizon=4)
    assert str(f) == "1212"

    avg, f = resolve_schedule(program, "uniform:5", rho)
    assert avg.nprocesses == 1
    assert f == ScheduleFragment([1] * 5)

    same, f = resolve_schedule(program, ScheduleFragment([2]), rho)
    assert f == ScheduleFragment([2])
    return


@pytest.mark.parametrize("token", ["abc", "13", "uniform:", "uniform:x"])
def test_resolve_schedule_invalid(token):
    program = build_example("c4-nondet")
    with pytest.raises(InvalidSchedule):
        resolve_schedule(program, token, vertex_state(0))
    return


def test_simulate_single_walk_halts():
    program = build_example("c4-w1")
    rho = vertex_state(0)
    f = ScheduleFragment([1] * 200)
    steps = simulate(program, f, rho)

    assert len(steps) == 201
    assert steps[-1].cumulative >= 1 - 1e-6
    assert_almost_equal(
        steps[-1].cumulative,
        termination_prob_fragment(program, f, rho)
    )

    cumulative = [s.cumulative for s in steps]
    assert all(b >= a - 1e-15 for a, b in zip(cumulative, cumulative[1:]))
    return


def test_simulate_alternating_never_halts():
    program = build_example("c4-nondet")
    steps = simulate(
        program,
        ScheduleFragment.from_string("12" * 100),
        vertex_state(0)
    )
    assert len(steps) == 201
    assert abs(steps[-1].cumulative) < 1e-10
    assert_almost_equal(steps[-1].trace, 1.0)
    return


def test_simulate_two_steps():
    program = build_example("c4-nondet")
    f = ScheduleFragment.from_string("11")
    steps = simulate(program, f, vertex_state(0))

    assert [s.step for s in steps] == [0, 1, 2]
    assert_almost_equal(steps[1].cumulative, 0.0)
    assert_almost_equal(steps[2].cumulative, 4 / 9)
    assert_almost_equal(steps[2].trace, 1.0)
    return


def test_simulate_empty_fragment():
    program = build_example("c4-nondet")
    rho = DensityOperator(np.diag([0.5, 0.0, 0.5, 0.0]))
    steps = simulate(program, ScheduleFragment(), rho)

    assert len(steps) == 1
    assert steps[0].step == 0
    assert_almost_equal(steps[0].trace, 1.0)
    assert_almost_equal(steps[0].cumulative, 0.5)
    return


@pytest.mark.parametrize(
    "a,b",
    list(itertools.combinations_with_replacement(range(4), 2))
)
def test_verdict_of_mixture(a, b):
    program = build_example("c4-nondet")
    first = check_termination(program, vertex_state(a)).terminating
    second = check_termination(program, vertex_state(b)).terminating

    mixture = (vertex_state(a).matrix + vertex_state(b).matrix) / 2
    rho = DensityOperator(mixture)
    mixed = check_termination(program, rho).terminating
    assert mixed == (first and second)
    return


def test_vertex_two_terminates():
    program = build_example("c4-nondet")
    assert check_termination(program, vertex_state(2)).terminating
    return


@given(seed=st.integers(min_value=0, max_value=2**32 - 1))
@settings(max_examples=100, deadline=None)
def test_verdicts_are_confirmed(rand_program, rand_state, seed):
    program = rand_program(seed, diverging=(seed % 2 == 0))
    rho = rand_state(seed, d=program.dim, pure=True)
    verdict = check_termination(program, rho, horizon=20)

    if not verdict.terminating:
        assert len(verdict.witness_schedule) == 20
        assert verdict.witness_probability <= 1e-8
        psi = DensityOperator.from_pure(verdict.witness_vector)
        assert termination_prob_fragment(
            program,
            verdict.witness_schedule,
            psi
        ) <= 1e-8
    else:
        assert verdict.witness_schedule is None

    bounds = [
        infimum_lower_bound(program, rho, n)
        for n
        in range(1, 7)
    ]
    assert all(b >= a - 1e-12 for a, b in zip(bounds, bounds[1:]))
    return


@given(seed=st.integers(min_value=0, max_value=2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_verdict_is_convex(rand_program, rand_state, seed):
    program = rand_program(seed, diverging=True)
    first = rand_state(seed, d=program.dim, pure=True)
    second = rand_state(seed + 1, d=program.dim, pure=True)
    mixed = DensityOperator((first.matrix + second.matrix) / 2)

    expected = (
        check_termination(program, first).terminating
        and check_termination(program, second).terminating
    )
    assert check_termination(program, mixed).terminating == expected
    return


def invariant_plane_program() -> Program:
    """ d = 3, halting on |0>. Both processes keep span{|0>, |1>} and fix
    |2>, so exactly the pure states in span{|0>, |1>} terminate.
    """

    x = np.array([[0, 1, 0], [1, 0, 0], [0, 0, 1]], dtype=complex)
    h = np.array([
        [1 / np.sqrt(2), 1 / np.sqrt(2), 0],
        [1 / np.sqrt(2), -1 / np.sqrt(2), 0],
        [0, 0, 1],
    ], dtype=complex)
    p0 = np.diag([1.0, 0.0, 0.0]).astype(complex)
    return Program(
        [SuperOperator.unitary(x), SuperOperator.unitary(h)],
        Measurement(p0, np.eye(3) - p0)
    )


def assert_runs_stay_terminating(program, rho, max_length=3):
    for n in range(max_length + 1):
        for f in fragments(program.nprocesses, n):
            state = run_fragment(program, f, rho)
            if state.trace < 1e-4:
                continue

            normalised = DensityOperator(state.matrix / state.trace)
            assert check_termination(program, normalised).terminating
    return


@given(
    a=st.complex_numbers(max_magnitude=10, allow_nan=False),
    b=st.complex_numbers(max_magnitude=10, allow_nan=False),
)
@settings(max_examples=50, deadline=None)
def test_terminating_pure_states_form_a_subspace(a, b):
    program = invariant_plane_program()
    basis = np.eye(3)
    for i in (0, 1):
        rho = DensityOperator.from_pure(basis[i])
        assert check_termination(program, rho).terminating
    assert not check_termination(
        program,
        DensityOperator.from_pure(basis[2])
    ).terminating

    v = a * basis[0] + b * basis[1]
    size = np.linalg.norm(v)
    if size < 1e-3:
        return

    rho = DensityOperator.from_pure(v / size)
    assert check_termination(program, rho).terminating
    assert_runs_stay_terminating(program, rho)
    return


@given(seed=st.integers(min_value=0, max_value=2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_terminating_states_stay_terminating(rand_program, rand_state, seed):
    program = rand_program(seed, diverging=(seed % 2 == 0))
    rho = rand_state(seed, d=program.dim, pure=True)
    verdict = check_termination(program, rho)
    if not verdict.terminating or verdict.diagnostics.fragile:
        return

    assert_runs_stay_terminating(program, rho)
    return


@pytest.mark.parametrize("name", ["c4-w1", "c4-w2"])
def test_single_walk_runs_stay_terminating(rand_state, name):
    program = build_example(name)
    rho = rand_state(11, d=4)
    assert check_termination(program, rho).terminating
    assert_runs_stay_terminating(program, rho)
    return
