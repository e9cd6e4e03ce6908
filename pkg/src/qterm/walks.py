"""
Quantum walks on a four vertex cycle with one absorbing vertex, by default
vertex 2.

Two coin-free walk operators are available. Each run of a walk program
first checks whether the walker sits on the absorbing vertex, and halts if
it does. The walks alone halt with probability one; letting a scheduler
alternate between them does not.
"""

from typing import Union

import numpy as np

from qterm.data import MyEnum
from qterm.linalg import DTYPE
from qterm.channels import SuperOperator, Measurement, DensityOperator
from qterm.program import Program

DIM = 4

_W1 = [
    [1, 1, 0, -1],
    [1, -1, 1, 0],
    [0, 1, 1, 1],
    [1, 0, -1, 1],
]

_W2 = [
    [1, 1, 0, 1],
    [-1, 1, -1, 0],
    [0, 1, 1, -1],
    [1, 0, -1, -1],
]


class Example(MyEnum):
    c4_w1 = 1
    c4_w2 = 2
    c4_nondet = 3


def walk_unitary(which: int) -> np.ndarray:
    """ The walk operator W_1 or W_2. """

    if which == 1:
        rows = _W1
    elif which == 2:
        rows = _W2
    else:
        raise ValueError(f"There are only two walk operators, got {which}.")

    return np.array(rows, dtype=DTYPE) / np.sqrt(3)


def absorbing_measurement(
    dim: int = DIM,
    absorbing: int = 2,
) -> Measurement:
    """ {P_0, P_1} with P_0 = |absorbing><absorbing| and P_1 = I - P_0. """

    if not (0 <= absorbing < dim):
        raise ValueError(f"Absorbing vertex must be in 0..{dim - 1}.")

    p0 = np.zeros((dim, dim), dtype=DTYPE)
    p0[absorbing, absorbing] = 1
    return Measurement(p0, np.eye(dim, dtype=DTYPE) - p0)


def build_example(
    example: Union[str, int, Example],
    absorbing: int = 2,
) -> Program:
    """ The program for one of the packaged walks, halting on the given
    vertex.
    """

    example = Example.from_other(example)
    measurement = absorbing_measurement(DIM, absorbing)

    if example is Example.c4_w1:
        walks = [1]
    elif example is Example.c4_w2:
        walks = [2]
    else:
        walks = [1, 2]

    processes = [SuperOperator.unitary(walk_unitary(w)) for w in walks]
    return Program(processes, measurement)


def vertex_state(index: int = 0) -> DensityOperator:
    """ The walker on a single vertex, |index><index|. """
    return DensityOperator.basis_state(DIM, index)
