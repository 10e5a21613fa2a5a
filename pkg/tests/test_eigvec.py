import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qeig import NonDistinctSpectrumError, QMatrix, eig, fullrand, full_eigenvectors, triangular_eigenvectors
from qeig.oracle import eigenpair_error, match_spectra
from qeig.qmat import frob_norm, qmatmul_data
from qeig.quat import EPS, Quaternion, qmul_arr

from conftest import separated_eigenvalues

# constant in the columnwise bound ||T x - x lam|| <= C n eps ||T||_F ||x||
RESIDUAL_C = 10.0


def column_residuals(T, X, lam):
    TX = qmatmul_data(T.data, X.data)
    L = np.zeros((len(lam), 4))
    L[:, 0], L[:, 1] = lam.real, lam.imag
    XL = qmul_arr(X.data, L[None, :, :])
    return np.sqrt(np.sum((TX - XL) ** 2, axis=(0, 2))), np.sqrt(np.sum(X.data ** 2, axis=(0, 2)))


def triangular_with(lam, rng, offdiag=1.0):
    n = len(lam)
    d = offdiag * rng.standard_normal((n, n, 4))
    d[np.tril(np.ones((n, n), bool))] = 0.0
    d[np.arange(n), np.arange(n), 0] = lam.real
    d[np.arange(n), np.arange(n), 1] = lam.imag
    return QMatrix(d)


def test_diagonal_gives_identity():
    T = QMatrix.from_complex(np.diag([1, 2j, 3 + 1j]))
    es = triangular_eigenvectors(T)
    assert es.X == QMatrix.identity(3)


def test_two_by_two_example():
    gamma = Quaternion(0.25, -1, 2, 0.5)
    T = QMatrix.from_entries([[1, gamma], [0, 2]])
    es = triangular_eigenvectors(T)
    assert abs(es.X[0, 1] - gamma) <= 4 * EPS
    assert es.X[0, 0] == Quaternion(1.0) and es.X[1, 1] == Quaternion(1.0)
    assert es.X[1, 0] == Quaternion(0.0)
    L = QMatrix.from_complex(np.diag(es.lambdas))
    assert frob_norm(T @ es.X - es.X @ L) <= 8 * EPS


def test_structure_unit_diagonal(rng):
    T = triangular_with(separated_eigenvalues(rng, 12), rng)
    X = triangular_eigenvectors(T).X
    assert X.is_upper_triangular()
    assert np.all(X.diagonal() == [1.0, 0, 0, 0])
    assert np.array_equal(X.data[:, 0], QMatrix.identity(12).data[:, 0])


def test_normalized_columns(rng):
    T = triangular_with(separated_eigenvalues(rng, 6), rng)
    X = triangular_eigenvectors(T, normalize=True).X
    assert np.allclose(np.sqrt(np.sum(X.data ** 2, axis=(0, 2))), 1.0, atol=1e-15)


def test_repeated_class_rejected():
    T = QMatrix.from_complex(np.array([[1 + 1j, 1], [0, 1 - 1j]]))
    T.data[1, 1, 1] = 1.0  # same as T[0, 0]
    with pytest.raises(NonDistinctSpectrumError) as exc:
        triangular_eigenvectors(T)
    assert exc.value.indices == (0, 1)


@given(st.integers(2, 24), st.integers(0, 2**32 - 1))
def test_columnwise_residual(n, seed):
    rng = np.random.default_rng(seed)
    lam = separated_eigenvalues(rng, n)
    T = triangular_with(lam, rng)
    es = triangular_eigenvectors(T)
    r, xn = column_residuals(T, es.X, es.lambdas)
    assert np.all(r <= RESIDUAL_C * n * EPS * frob_norm(T) * xn)


def test_full_eigenvectors_identity(rng):
    T = triangular_with(separated_eigenvalues(rng, 4), rng)
    es = triangular_eigenvectors(T)
    assert full_eigenvectors(QMatrix.identity(4), es) == es.X
    with pytest.raises(ValueError):
        full_eigenvectors(QMatrix.identity(3), es)


def test_example_matrix_eigenpairs(example_matrix):
    lam, X, _ = eig(example_matrix)
    assert match_spectra(lam, [1, 1j]) <= 1e-14
    A = example_matrix
    for k in range(2):
        x = X.data[:, k:k + 1]
        Ax = qmatmul_data(A.data, x)[:, 0]
        xl = qmul_arr(x[:, 0], np.array([lam[k].real, lam[k].imag, 0, 0]))
        assert np.linalg.norm(Ax - xl) <= 1e-14 * np.linalg.norm(x)
    # the listed eigenvector for i spans the same right-quaternion line
    k = int(np.argmax(lam.imag))
    ref = QMatrix.from_entries([[Quaternion(1, 0, -1, 1)], [Quaternion(2, 0, -1, 1)]])
    q = ref[0, 0].inv() * X[0, k]
    assert frob_norm(QMatrix(X.data[:, k:k + 1]) - ref @ QMatrix.from_entries([[q]])) <= 1e-14 * frob_norm(ref)


def test_right_scaling_invariance(example_matrix, rng):
    lam, X, _ = eig(example_matrix)
    A = example_matrix
    for k in range(2):
        q = Quaternion.from_array(rng.standard_normal(4))
        q = q / abs(q)
        xq = qmul_arr(X.data[:, k], q.to_array())
        mu = q.conj() * Quaternion.from_complex(lam[k]) * q
        lhs = qmatmul_data(A.data, xq[:, None, :])[:, 0]
        rhs = qmul_arr(xq, mu.to_array())
        assert np.linalg.norm(lhs - rhs) <= 1e-14 * np.linalg.norm(xq)


def test_fullrand32_end_to_end():
    A = fullrand(32, 0)
    lam, X, _ = eig(A)
    assert eigenpair_error(A, X, lam) <= 1e-14
