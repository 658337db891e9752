import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pqc.densmat import (
    DimensionError,
    ValidationError,
    haar_random_pure_state,
    haar_random_pure_states,
    haar_random_unitary,
    hermitian_spectrum,
    kron,
    partial_trace,
    projector,
    rng_for,
    validate_density_matrix,
)
from pqc.noise import X, Z

from conftest import random_density_matrix


def test_kron_identity():
    np.testing.assert_array_equal(kron(np.eye(2), np.eye(2)), np.eye(4))


def test_kron_block_order():
    p0 = np.diag([1, 0])
    out = kron(p0, X)
    np.testing.assert_array_equal(out[:2, :2], X)
    np.testing.assert_array_equal(out[2:, :], 0)
    np.testing.assert_array_equal(out[:, 2:], 0)


def test_kron_mixed_product(rng):
    a, b = rng.standard_normal((2, 2, 2)) + 1j * rng.standard_normal((2, 2, 2))
    v, w = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    np.testing.assert_allclose(kron(a, b) @ np.kron(v, w), np.kron(a @ v, b @ w), atol=1e-12)


def test_kron_associative(rng):
    a, b, c = rng.standard_normal((3, 2, 3)) + 1j * rng.standard_normal((3, 2, 3))
    np.testing.assert_allclose(kron(kron(a, b), c), kron(a, kron(b, c)), atol=1e-12)


def test_partial_trace_product(rng):
    rho = random_density_matrix(2, rng)
    big = np.kron(np.diag([1.0, 0.0]), rho)
    np.testing.assert_allclose(partial_trace(big, [2, 2], keep=[1]), rho, atol=1e-14)


def test_partial_trace_bell():
    bell = np.array([1, 0, 0, 1]) / np.sqrt(2)
    np.testing.assert_allclose(partial_trace(projector(bell), [2, 2], keep=[0]), np.eye(2) / 2, atol=1e-15)


def test_partial_trace_matches_index_contraction(rng):
    rho = random_density_matrix(4, rng)
    t = rho.reshape(2, 2, 2, 2)
    expected = np.array([[sum(t[a, i, a, j] for a in range(2)) for j in range(2)] for i in range(2)])
    red = partial_trace(rho, [2, 2], keep=[1])
    np.testing.assert_allclose(red, expected, atol=1e-14)
    assert abs(np.trace(red) - 1) < 1e-12


def test_partial_trace_three_factors_and_unit_factor(rng):
    rho = random_density_matrix(8, rng)
    # factor of dimension 1 is a no-op
    np.testing.assert_allclose(partial_trace(rho, [1, 8], keep=[1]), rho, atol=1e-15)
    r02 = partial_trace(rho, [2, 2, 2], keep=[0, 2])
    r0 = partial_trace(rho, [2, 2, 2], keep=[0])
    np.testing.assert_allclose(partial_trace(r02, [2, 2], keep=[0]), r0, atol=1e-14)


def test_partial_trace_linear(rng):
    a, b = random_density_matrix(4, rng), random_density_matrix(4, rng)
    lam = 0.37
    lhs = partial_trace(lam * a + (1 - lam) * b, [2, 2], keep=[0])
    rhs = lam * partial_trace(a, [2, 2], keep=[0]) + (1 - lam) * partial_trace(b, [2, 2], keep=[0])
    np.testing.assert_allclose(lhs, rhs, atol=1e-14)


def test_partial_trace_bad_layout(rng):
    with pytest.raises(DimensionError):
        partial_trace(random_density_matrix(4, rng), [2, 3], keep=[0])
    with pytest.raises(ValueError):
        partial_trace(random_density_matrix(4, rng), [2, 2], keep=[])


def test_spectrum_z():
    lam, vecs = hermitian_spectrum(Z)
    np.testing.assert_allclose(lam, [1, -1])
    np.testing.assert_allclose(np.abs(vecs), np.eye(2), atol=1e-15)


def test_spectrum_x():
    lam, vecs = hermitian_spectrum(X)
    np.testing.assert_allclose(lam, [1, -1], atol=1e-15)
    plus = np.array([1, 1]) / np.sqrt(2)
    assert abs(abs(np.vdot(vecs[:, 0], plus)) - 1) < 1e-12


def test_spectrum_reconstruction(rng):
    g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    h = g + g.conj().T
    lam, v = hermitian_spectrum(h)
    assert np.all(np.diff(lam) <= 0)
    assert np.max(np.abs(v @ np.diag(lam) @ v.conj().T - h)) <= 1e-10
    assert abs(lam.sum() - np.trace(h).real) <= 1e-10


def test_spectrum_rejects_non_hermitian():
    with pytest.raises(ValidationError):
        hermitian_spectrum(np.array([[0, 1], [0, 0]]))


def test_haar_state_contracts():
    s = haar_random_pure_state(1, 5)
    assert abs(abs(s[0]) - 1) < 1e-15
    np.testing.assert_array_equal(haar_random_pure_state(4, 11), haar_random_pure_state(4, 11))
    with pytest.raises(ValueError):
        haar_random_pure_state(0, 1)


def test_haar_state_z_moment():
    psi = haar_random_pure_states(100_000, 2, rng_for(3))
    z = np.abs(psi[:, 0]) ** 2 - np.abs(psi[:, 1]) ** 2
    assert abs(z.mean()) < 0.02
    # second moment of <Z> under Haar on a qubit is 1/3
    assert abs((z**2).mean() - 1 / 3) < 0.01


def test_haar_unitary_contracts():
    u1 = haar_random_unitary(1, 3)
    assert abs(abs(u1[0, 0]) - 1) < 1e-15
    for seed in range(5):
        u = haar_random_unitary(4, seed)
        assert np.max(np.abs(u.conj().T @ u - np.eye(4))) <= 1e-10
    with pytest.raises(ValueError):
        haar_random_unitary(0, 0)


def test_haar_unitary_column_matches_state_moments():
    cols = np.array([haar_random_unitary(2, s)[:, 0] for s in range(4000)])
    z = np.abs(cols[:, 0]) ** 2 - np.abs(cols[:, 1]) ** 2
    assert abs(z.mean()) < 0.05
    assert abs((z**2).mean() - 1 / 3) < 0.03


def test_validate_density_matrix():
    assert validate_density_matrix(np.eye(2) / 2)
    bad = validate_density_matrix(np.diag([1.5, -0.5]))
    assert not bad
    assert "negativity" in bad.failures()
    assert not validate_density_matrix(np.eye(2))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31 - 1), st.integers(1, 6))
def test_samplers_pure_in_seed(seed, dim):
    np.testing.assert_array_equal(haar_random_pure_state(dim, seed), haar_random_pure_state(dim, seed))
    np.testing.assert_array_equal(haar_random_unitary(dim, seed), haar_random_unitary(dim, seed))
