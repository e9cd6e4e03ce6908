import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_almost_equal

from hypothesis import given, settings, strategies as st

from qterm.linalg import Tolerance, InvalidTolerance, NotSquare, NotHermitian
from qterm.linalg import as_matrix, fix_phase, hermitian_eig
from qterm.linalg import orthonormalize_extend, null_space, range_basis


def test_tolerance_defaults():
    tol = Tolerance()
    assert tol.eps_rank == 1e-9
    assert tol.eps_contain == 1e-8
    assert tol.eps_prob == 1e-9
    assert tol.validate() is tol
    return


def test_tolerance_from_contain():
    tol = Tolerance.from_contain(1e-6)
    assert_almost_equal(tol.eps_rank, 1e-7)
    assert_almost_equal(tol.eps_prob, 1e-7)
    assert tol.eps_contain == 1e-6
    return


@pytest.mark.parametrize("kwargs", [
    {"eps_rank": 0.0},
    {"eps_contain": -1e-8},
    {"eps_prob": float("nan")},
    {"eps_rank": 1e-6, "eps_contain": 1e-8},
])
def test_tolerance_invalid(kwargs):
    with pytest.raises(InvalidTolerance):
        Tolerance(**kwargs).validate()
    return


def test_as_matrix_rejects_non_square():
    with pytest.raises(NotSquare):
        as_matrix(np.zeros((2, 3)), square=True)
    return


@pytest.mark.parametrize("m", [
    [1, 2, 3],
    [[1, np.nan], [0, 1]],
    [[1, np.inf], [0, 1]],
])
def test_as_matrix_rejects_bad_input(m):
    with pytest.raises(ValueError):
        as_matrix(m)
    return


def test_hermitian_eig_descending():
    m = np.diag([1.0, 3.0, 2.0])
    values, vectors = hermitian_eig(m)
    assert_allclose(values, [3.0, 2.0, 1.0])
    assert_allclose(np.abs(vectors[:, 0]), [0, 1, 0], atol=1e-12)

    # Reconstruction.
    recon = vectors @ np.diag(values) @ vectors.conj().T
    assert_allclose(recon, m, atol=1e-12)
    return


def test_hermitian_eig_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        hermitian_eig([[0, 1], [0, 0]])
    return


def test_fix_phase_makes_leading_entry_positive():
    v = np.array([[0.0], [-1j], [0.0]])
    fixed = fix_phase(v)
    assert_allclose(fixed[:, 0], [0, 1, 0])
    return


def test_orthonormalize_extend():
    basis = np.array([[1.0], [0.0], [0.0]], dtype=complex)

    assert orthonormalize_extend(basis, [2.0, 0.0, 0.0]) is None

    ext = orthonormalize_extend(basis, [1.0, 1.0, 0.0])
    assert_allclose(ext, [0, 1, 0], atol=1e-15)

    ext = orthonormalize_extend(np.zeros((3, 0)), [0.0, 3.0, 4.0])
    assert_allclose(ext, [0, 0.6, 0.8])
    return


def test_orthonormalize_extend_ignores_noise():
    basis = np.eye(3, 2, dtype=complex)
    assert orthonormalize_extend(basis, [1.0, 1.0, 1e-12]) is None
    return


@pytest.mark.parametrize("m,rank", [
    (np.zeros((3, 3)), 0),
    (np.eye(3), 3),
    (np.diag([1.0, 1e-14, 0.0]), 1),
    ([[1, 1], [1, 1]], 1),
])
def test_null_space_and_range(m, rank):
    kernel = null_space(m, scale=1.0)
    image = range_basis(m, scale=1.0)
    arr = np.asarray(m, dtype=complex)

    assert kernel.shape == (arr.shape[1], arr.shape[1] - rank)
    assert image.shape == (arr.shape[0], rank)

    assert_allclose(arr @ kernel, 0, atol=1e-12)
    gram = kernel.conj().T @ kernel
    assert_allclose(gram, np.eye(kernel.shape[1]), atol=1e-12)
    assert_allclose(image.conj().T @ image, np.eye(rank), atol=1e-12)
    return


def test_null_space_of_empty_matrix():
    kernel = null_space(np.zeros((0, 3)))
    assert_allclose(kernel, np.eye(3))
    return


@given(seed=st.integers(min_value=0, max_value=2**32 - 1))
@settings(max_examples=100, deadline=None)
def test_hermitian_eig_reconstructs(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, 7))
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    m = (g + g.conj().T) * rng.uniform(1e-3, 1e3)

    tol = Tolerance()
    values, vectors = hermitian_eig(m, tol)
    rebuilt = (vectors * values) @ vectors.conj().T

    assert np.all(np.diff(values) <= 0)
    assert (
        np.linalg.norm(rebuilt - m, 2)
        <= 10 * tol.eps_rank * np.linalg.norm(m, 2)
    )
    return


@given(seed=st.integers(min_value=0, max_value=2**32 - 1))
@settings(max_examples=100, deadline=None)
def test_kernel_and_range_dimensions_add_up(seed):
    rng = np.random.default_rng(seed)
    rows = int(rng.integers(1, 7))
    cols = int(rng.integers(1, 7))
    rank = int(rng.integers(0, min(rows, cols) + 1))

    left = rng.normal(size=(rows, rank)) + 1j * rng.normal(size=(rows, rank))
    right = rng.normal(size=(rank, cols)) + 1j * rng.normal(size=(rank, cols))
    m = left @ right

    kernel = null_space(m)
    image = range_basis(m)
    assert kernel.shape[1] + image.shape[1] == cols
    assert image.shape[1] == rank
    assert_allclose(m @ kernel, 0, atol=1e-9 * max(1.0, np.linalg.norm(m)))
    return
