import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from etfgap.errors import NotHermitian, ZeroVector
from etfgap.matcore import (
    hermitian_eigen,
    numerical_rank,
    orthonormal_kernel_basis,
    unitary_mapping_to_e1,
)

from conftest import random_unitary


def random_hermitian(rng, n):
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return z + z.conj().T


def test_eigen_identity():
    e = hermitian_eigen(np.eye(3))
    np.testing.assert_allclose(e.values, [1, 1, 1], atol=1e-15)


def test_eigen_swap_matrix():
    e = hermitian_eigen(np.array([[0.0, 1.0], [1.0, 0.0]]))
    np.testing.assert_allclose(e.values, [-1, 1], atol=1e-15)


def test_eigen_values_ascending_and_phase_normalized(rng):
    e = hermitian_eigen(random_hermitian(rng, 7))
    assert np.all(np.diff(e.values) >= 0)
    for j in range(7):
        col = e.vectors[:, j]
        first = col[np.argmax(np.abs(col) > 1e-12)]
        assert abs(first.imag) < 1e-15 and first.real > 0


def test_eigen_matches_lapack(rng):
    m = random_hermitian(rng, 20)
    np.testing.assert_allclose(hermitian_eigen(m).values, np.linalg.eigvalsh(m), atol=1e-12)


def test_eigen_is_deterministic(rng):
    m = random_hermitian(rng, 9)
    a, b = hermitian_eigen(m), hermitian_eigen(m.copy())
    assert np.array_equal(a.values, b.values) and np.array_equal(a.vectors, b.vectors)


def test_eigen_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        hermitian_eigen(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(NotHermitian):
        hermitian_eigen(np.ones((2, 3)))


@settings(max_examples=25, deadline=None)
@given(n=st.integers(1, 64), seed=st.integers(0, 2**32 - 1))
def test_eigen_reconstruction(n, seed):
    rng = np.random.default_rng(seed)
    m = random_hermitian(rng, n)
    tol = 1e-10
    e = hermitian_eigen(m, tol)
    v = e.vectors
    scale = np.max(np.abs(m))
    assert np.max(np.abs(v @ np.diag(e.values) @ v.conj().T - m)) <= 10 * tol * scale
    assert np.max(np.abs(v.conj().T @ v - np.eye(n))) <= tol
    resid = np.linalg.norm(m @ v - v * e.values, axis=0)
    assert np.all(resid <= tol * np.linalg.norm(m, 2))


def test_rank_zero_and_outer_product(rng):
    assert numerical_rank(np.zeros((4, 4))) == 0
    u = rng.normal(size=5) + 1j * rng.normal(size=5)
    assert numerical_rank(np.outer(u, u.conj())) == 1


def test_rank_rejects_bad_tolerance():
    with pytest.raises(ValueError):
        numerical_rank(np.eye(2), 1.5)


@settings(max_examples=30, deadline=None)
@given(n=st.integers(2, 16), data=st.data())
def test_rank_unitary_invariance(n, data):
    r = data.draw(st.integers(1, n))  # relative threshold: r = 0 is not well separated
    seed = data.draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    sv = np.concatenate([rng.uniform(1.0, 2.0, r), rng.uniform(0, 1e-12, n - r)])
    u, w = random_unitary(rng, n), random_unitary(rng, n)
    m = u @ np.diag(sv) @ w
    expected = numerical_rank(m)
    assert expected == r
    assert numerical_rank(random_unitary(rng, n) @ m @ random_unitary(rng, n)) == expected


def test_kernel_basis_trivial_cases():
    assert orthonormal_kernel_basis(np.eye(2)).shape == (2, 0)
    k = orthonormal_kernel_basis(np.zeros((2, 2)))
    assert k.shape == (2, 2)
    np.testing.assert_allclose(k.conj().T @ k, np.eye(2), atol=1e-15)


def test_kernel_basis_of_wide_matrix(rng):
    m = rng.normal(size=(3, 7)) + 1j * rng.normal(size=(3, 7))
    k = orthonormal_kernel_basis(m)
    assert k.shape == (7, 4)
    assert np.max(np.abs(m @ k)) < 1e-12
    np.testing.assert_allclose(k.conj().T @ k, np.eye(4), atol=1e-12)


def test_unitary_e1_is_identity():
    np.testing.assert_array_equal(unitary_mapping_to_e1([1, 0, 0]), np.eye(3))


def test_unitary_e2_is_permutation():
    u = unitary_mapping_to_e1([0, 1])
    np.testing.assert_allclose(u @ [0, 1], [1, 0], atol=1e-15)
    np.testing.assert_allclose(np.abs(u), [[0, 1], [1, 0]], atol=1e-15)


def test_unitary_complex_vector():
    v = np.array([1, 1j]) / np.sqrt(2)
    u = unitary_mapping_to_e1(v)
    np.testing.assert_allclose(u @ v, [1, 0], atol=1e-12)


def test_unitary_zero_vector():
    with pytest.raises(ZeroVector):
        unitary_mapping_to_e1([0, 0])


@settings(max_examples=50, deadline=None)
@given(n=st.integers(1, 12), log_scale=st.floats(-3, 3), seed=st.integers(0, 2**32 - 1))
def test_unitary_mapping_property(n, log_scale, seed):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    v *= 10.0**log_scale / np.linalg.norm(v)
    u = unitary_mapping_to_e1(v)
    assert np.max(np.abs(u.conj().T @ u - np.eye(n))) <= 1e-12
    w = u @ v
    assert abs(w[0] - np.linalg.norm(v)) <= 1e-12 * np.linalg.norm(v)
    assert np.max(np.abs(w[1:]), initial=0.0) <= 1e-12 * np.linalg.norm(v)
