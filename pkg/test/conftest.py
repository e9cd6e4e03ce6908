"""
Shared random generators for the property tests.

The fixtures are session scoped and return factories taking a seed, so
they can be combined with hypothesis strategies over integer seeds.
"""

import numpy as np
import pytest

from qterm.linalg import DTYPE
from qterm.subspaces import Subspace
from qterm.channels import SuperOperator, Measurement, DensityOperator
from qterm.program import Program


def random_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_kraus(rng: np.random.Generator, d: int, r: int) -> np.ndarray:
    """ r Kraus elements with sum E^dagger E = I, from the blocks of an
    isometry.
    """

    z = rng.normal(size=(r * d, d)) + 1j * rng.normal(size=(r * d, d))
    q, _ = np.linalg.qr(z)
    return q.reshape(r, d, d)


@pytest.fixture(scope="session")
def rand_channel():
    def factory(seed: int, d: int = 3, r: int = 2) -> SuperOperator:
        rng = np.random.default_rng(seed)
        return SuperOperator(random_kraus(rng, d, r))
    return factory


@pytest.fixture(scope="session")
def rand_subspace():
    def factory(seed: int, d: int = 4, k: int = 2) -> Subspace:
        rng = np.random.default_rng(seed)
        vectors = rng.normal(size=(d, k)) + 1j * rng.normal(size=(d, k))
        return Subspace.from_vectors(vectors)
    return factory


@pytest.fixture(scope="session")
def rand_state():
    def factory(seed: int, d: int = 3, pure: bool = False) -> DensityOperator:
        rng = np.random.default_rng(seed)
        if pure:
            v = rng.normal(size=d) + 1j * rng.normal(size=d)
            return DensityOperator.from_pure(v / np.linalg.norm(v))

        g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        rho = g @ g.conj().T
        return DensityOperator(rho / np.trace(rho).real)
    return factory


@pytest.fixture(scope="session")
def rand_program():
    """ Random programs with d <= 4 and m <= 3.

    With diverging=True the first process is a unitary that maps
    ker M_0 onto itself, so every state in ker M_0 can run forever.
    """

    def factory(seed: int, diverging: bool = False) -> Program:
        rng = np.random.default_rng(seed)
        d = int(rng.integers(2, 5))
        m = int(rng.integers(1, 4))
        halting_rank = int(rng.integers(1, d))

        u = random_unitary(rng, d)
        p0 = u[:, :halting_rank] @ u[:, :halting_rank].conj().T
        measurement = Measurement(p0, np.eye(d, dtype=DTYPE) - p0)

        processes = []
        for i in range(m):
            if diverging and i == 0:
                block = np.zeros((d, d), dtype=DTYPE)
                block[:halting_rank, :halting_rank] = random_unitary(
                    rng,
                    halting_rank
                )
                block[halting_rank:, halting_rank:] = random_unitary(
                    rng,
                    d - halting_rank
                )
                processes.append(SuperOperator.unitary(u @ block @ u.conj().T))
            else:
                r = int(rng.integers(1, 3))
                processes.append(SuperOperator(random_kraus(rng, d, r)))

        return Program(processes, measurement)
    return factory
