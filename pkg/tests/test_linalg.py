import numpy as np
import pytest

from phasegate.linalg import dag, eig_hermitian, is_hermitian, partial_trace, tensor

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)


def kron_by_hand(a, b):
    """Index-by-index Kronecker product, the oracle for tensor()."""
    ra, ca = a.shape
    rb, cb = b.shape
    out = np.zeros((ra * rb, ca * cb), dtype=complex)
    for i in range(ra):
        for j in range(ca):
            for k in range(rb):
                for l in range(cb):
                    out[i * rb + k, j * cb + l] = a[i, j] * b[k, l]
    return out


def reduced_by_hand(m, traced_out):
    """Explicit basis sum for the 2x2 partial trace."""
    out = np.zeros((2, 2), dtype=complex)
    for k in range(2):
        for l in range(2):
            for i in range(2):
                if traced_out == 0:
                    out[k, l] += m[2 * i + k, 2 * i + l]
                else:
                    out[k, l] += m[2 * k + i, 2 * l + i]
    return out


def random_hermitian(rng, n):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return a + a.conj().T


class TestTensor:
    def test_identity_case(self):
        np.testing.assert_allclose(tensor(I2, I2), np.eye(4))

    def test_projector_product(self):
        p0 = np.diag([1.0, 0.0])
        np.testing.assert_allclose(tensor(p0, p0), np.diag([1.0, 0, 0, 0]))

    def test_pauli_x_times_z_entries(self):
        t = tensor(X, Z)
        expected = np.zeros((4, 4), dtype=complex)
        expected[0, 2] = 1
        expected[1, 3] = -1
        expected[2, 0] = 1
        expected[3, 1] = -1
        np.testing.assert_allclose(t, expected)

    def test_matches_hand_kronecker(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            b = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            np.testing.assert_allclose(tensor(a, b), kron_by_hand(a, b), atol=1e-14)

    def test_associative(self):
        rng = np.random.default_rng(2)
        a, b, c = (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)) for _ in range(3))
        np.testing.assert_allclose(tensor(tensor(a, b), c), tensor(a, tensor(b, c)), atol=1e-13)

    def test_trace_multiplicative(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            a = random_hermitian(rng, 2)
            b = random_hermitian(rng, 2)
            np.testing.assert_allclose(np.trace(tensor(a, b)), np.trace(a) * np.trace(b), atol=1e-12)


class TestPartialTrace:
    def test_product_state_factorizes(self):
        rng = np.random.default_rng(4)
        rho = random_hermitian(rng, 2)
        sigma = random_hermitian(rng, 2)
        np.testing.assert_allclose(
            partial_trace(tensor(rho, sigma), 0), np.trace(rho) * sigma, atol=1e-12
        )
        np.testing.assert_allclose(
            partial_trace(tensor(rho, sigma), 1), np.trace(sigma) * rho, atol=1e-12
        )

    def test_identity(self):
        np.testing.assert_allclose(partial_trace(np.eye(4), 1), 2 * I2)

    def test_bell_state_reduces_to_mixed(self):
        phi_plus = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
        rho = np.outer(phi_plus, phi_plus.conj())
        np.testing.assert_allclose(partial_trace(rho, 0), I2 / 2, atol=1e-14)
        np.testing.assert_allclose(partial_trace(rho, 0), reduced_by_hand(rho, 0), atol=1e-14)

    def test_matches_hand_sum(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
            np.testing.assert_allclose(partial_trace(m, 0), reduced_by_hand(m, 0), atol=1e-13)
            np.testing.assert_allclose(partial_trace(m, 1), reduced_by_hand(m, 1), atol=1e-13)

    def test_preserves_full_trace(self):
        rng = np.random.default_rng(6)
        for _ in range(20):
            m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
            for side in (0, 1):
                np.testing.assert_allclose(np.trace(partial_trace(m, side)), np.trace(m), atol=1e-12)

    def test_rejects_wrong_shape(self):
        with pytest.raises(ValueError, match="4x4"):
            partial_trace(np.eye(3), 0)
        with pytest.raises(ValueError, match="traced_out"):
            partial_trace(np.eye(4), 2)


class TestEigHermitian:
    def test_diagonal(self):
        w, v = eig_hermitian(np.diag([2.0, 1.0]))
        np.testing.assert_allclose(w, [1.0, 2.0])
        # Ascending order permutes the identity columns.
        np.testing.assert_allclose(np.abs(v), [[0, 1], [1, 0]], atol=1e-14)

    def test_pauli_x_closed_form(self):
        w, v = eig_hermitian(X)
        np.testing.assert_allclose(w, [-1.0, 1.0], atol=1e-14)
        minus = np.array([1, -1]) / np.sqrt(2)
        plus = np.array([1, 1]) / np.sqrt(2)
        # Eigenvectors fixed only up to phase; compare by overlap modulus.
        assert abs(np.vdot(minus, v[:, 0])) == pytest.approx(1.0, abs=1e-12)
        assert abs(np.vdot(plus, v[:, 1])) == pytest.approx(1.0, abs=1e-12)

    def test_degenerate_spectrum(self):
        w, v = eig_hermitian(np.eye(4) / 4)
        np.testing.assert_allclose(w, [0.25] * 4)
        # Any orthonormal basis is fine; check the eigenspace projector.
        np.testing.assert_allclose(v @ dag(v), np.eye(4), atol=1e-12)

    def test_reconstruction_on_random_matrices(self):
        rng = np.random.default_rng(7)
        for _ in range(1000):
            m = random_hermitian(rng, 4)
            w, v = eig_hermitian(m)
            assert np.all(np.diff(w) >= -1e-12)
            np.testing.assert_allclose(v @ np.diag(w) @ dag(v), m, atol=1e-9)

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError, match="not Hermitian"):
            eig_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_hermiticity_predicate(self):
        assert is_hermitian(X)
        assert not is_hermitian(X + 1e-8 * np.array([[0, 1j], [0, 0]]))
