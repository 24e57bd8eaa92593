import numpy as np
import pytest

from shiftsolve import (
    InfiniteEigenvalueError,
    SchurConvergenceError,
    count_flops,
    eig,
    generalized_eig,
    generalized_triang_eig,
    hessenberg_reduce,
    normalize_columns,
    relative_residual,
    safe_multishift_trsm,
    schur,
    schur_qr,
    triang_eig,
)
from shiftsolve.generators import grcar, jordan, uniform_ball_matrix

from conftest import EPS, crandn


def _reconstruction(A, Q, M):
    return np.linalg.norm(A - Q @ M @ Q.conj().T) / np.linalg.norm(A)


def test_hessenberg_of_hessenberg_is_identity(rng):
    H = np.triu(crandn(rng, 8, 8), -1)
    H2, Q = hessenberg_reduce(H)
    np.testing.assert_array_equal(Q, np.eye(8))
    np.testing.assert_array_equal(H2, H)


def test_hessenberg_hermitian_is_tridiagonal(rng):
    A = crandn(rng, 20, 20)
    A = A + A.conj().T
    H, Q = hessenberg_reduce(A)
    assert np.abs(np.triu(H, 2)).max() <= 1e-13 * np.abs(A).max()
    assert _reconstruction(A, Q, H) <= 1e-13


def test_hessenberg_random(rng):
    A = crandn(rng, 50, 50)
    H, Q = hessenberg_reduce(A)
    assert np.all(np.tril(H, -2) == 0)
    assert _reconstruction(A, Q, H) <= 1e-13
    assert np.linalg.norm(Q.conj().T @ Q - np.eye(50)) <= 100 * EPS * 50


def test_schur_qr_examples():
    T = np.triu(np.arange(1, 10).reshape(3, 3)).astype(complex)
    pair = schur_qr(T)
    np.testing.assert_array_equal(pair.t, T)
    pair = schur_qr(np.array([[0.0, 1], [1, 0]]))
    np.testing.assert_allclose(np.sort(pair.eigenvalues.real), [-1, 1], atol=1e-15)


@pytest.mark.parametrize("make", [lambda r: crandn(r, 50, 50), lambda r: grcar(60),
                                  lambda r: jordan(30, 2.0), lambda r: np.zeros((5, 5))])
def test_schur_invariants(rng, make):
    A = make(rng)
    m = A.shape[0]
    pair = schur(A)
    assert np.all(np.tril(pair.t, -1) == 0)
    assert np.linalg.norm(pair.q.conj().T @ pair.q - np.eye(m)) <= 100 * EPS * m
    if np.any(A):
        assert _reconstruction(A, pair.q, pair.t) <= 1000 * EPS * m


def test_schur_budget_exhausted():
    with pytest.raises(SchurConvergenceError):
        schur_qr(np.triu(crandn(np.random.default_rng(0), 10, 10), -1), maxit=1)


def test_triang_eig_examples():
    res = triang_eig(np.diag([1.0, 2.0]))
    np.testing.assert_array_equal(res.vectors, np.eye(2))
    np.testing.assert_array_equal(res.lam, [1, 2])
    res = triang_eig([[1.0, 1], [0, 2]])
    np.testing.assert_allclose(res.vectors, [[1, 1], [0, 1]])
    np.testing.assert_array_equal(res.scales, [1, 1])


def test_triang_eig_jordan2():
    T = jordan(2, 0.0)
    res = triang_eig(T)
    Z = res.vectors
    assert np.all(np.isfinite(Z)) and 0 < res.scales[1] <= 1
    Zn = normalize_columns(Z)
    assert np.linalg.norm(T @ Zn - Zn * res.lam) / np.linalg.norm(T) <= 1e-13


def test_triang_eig_structure(rng):
    m = 90
    T = np.triu(crandn(rng, m, m))
    res = triang_eig(T, nb=16)
    Z = res.vectors
    assert np.all(np.tril(Z, -1) == 0)
    np.testing.assert_array_equal(np.diagonal(Z), res.scales)
    assert np.all(np.abs(Z).max(axis=0) > 0)
    assert relative_residual(T, normalize_columns(Z), res.lam) <= 1e-13


def test_triang_eig_shortcut_halves_work(rng):
    m = 256
    T = np.triu(crandn(rng, m, m))
    with count_flops() as short:
        triang_eig(T, nb=32)
    B = -np.triu(T, 1)
    B[-1] = 1  # keep every column nonzero for the full-length comparison solve
    with count_flops() as full:
        safe_multishift_trsm(T, np.diagonal(T), B, nb=32)
    assert short.total <= 0.51 * full.total + 8 * m * m


@pytest.mark.parametrize("kind", ["diagonal", "bidiagonal", "jordan", "triangular", "dense"])
@pytest.mark.parametrize("m", [10, 120])
def test_residual_classes(rng, kind, m):
    if kind == "diagonal":
        A = np.diag(crandn(rng, m))
    elif kind == "bidiagonal":
        A = np.diag(crandn(rng, m)) + np.diag(crandn(rng, m - 1), 1)
    elif kind == "jordan":
        A = jordan(m, 0.5 - 0.25j)
    elif kind == "triangular":
        A = np.triu(crandn(rng, m, m))
    else:
        A = crandn(rng, m, m)
    res = triang_eig(A) if kind != "dense" else eig(A)
    # eigenvectors carry the safe-solve scale; defective inputs need unit columns
    X = normalize_columns(res.vectors)
    assert relative_residual(A, X, res.lam) <= 1e-13


def test_eig_diagonal():
    res = eig(np.diag([3.0, 1.0]))
    np.testing.assert_allclose(np.sort(res.lam.real), [1, 3])
    P = np.abs(normalize_columns(res.vectors))
    np.testing.assert_allclose(np.sort(P, axis=0), [[0, 0], [1, 1]], atol=1e-15)
    np.testing.assert_allclose(np.sort(P, axis=1), [[0, 1], [0, 1]], atol=1e-15)


def test_eig_hermitian_orthogonal(rng):
    A = crandn(rng, 50, 50)
    A = A + A.conj().T
    res = eig(A)
    X = res.vectors / np.linalg.norm(res.vectors, axis=0)
    assert np.abs(X.conj().T @ X - np.eye(50)).max() <= 1e-6


def test_eig_similar_to_diagonal(rng):
    m = 40
    d = np.arange(1, m + 1) + 0.5j * rng.random(m)
    W = np.eye(m) + 0.1 * crandn(rng, m, m) / np.sqrt(m)
    A = W @ np.diag(d) @ np.linalg.inv(W)
    res = eig(A)
    np.testing.assert_allclose(np.sort_complex(res.lam), np.sort_complex(d), atol=1e-8)


@pytest.mark.parametrize("m", [50, 200])
def test_eig_uniform_ball_residual(m):
    A = uniform_ball_matrix(m, seed=m)
    res = eig(A)
    assert relative_residual(A, res.vectors, res.lam) <= 1e-13


def test_back_transform_bound(rng):
    A = crandn(rng, 60, 60)
    pair = schur(A)
    res = triang_eig(pair.t)
    X = pair.q @ res.vectors
    Z = res.vectors
    lhs = np.linalg.norm(A @ X - X * res.lam)
    rhs = (np.linalg.norm(A - pair.q @ pair.t @ pair.q.conj().T) * np.linalg.norm(Z)
           + np.linalg.norm(pair.q, 2) * np.linalg.norm(pair.t @ Z - Z * res.lam))
    assert lhs <= 1.01 * rhs + 1e-14


def test_generalized_examples():
    res = generalized_triang_eig(np.diag([2.0, 6.0]), np.diag([1.0, 2.0]))
    np.testing.assert_allclose(res.lam, [2, 3])
    np.testing.assert_allclose(res.vectors, np.eye(2))
    T = np.array([[1.0, 1], [0, 2]])
    S = np.array([[1.0, 1], [0, 1]])
    res = generalized_triang_eig(T, S)
    np.testing.assert_allclose(res.lam, [1, 2])
    np.testing.assert_allclose(res.vectors, [[1, -1], [0, 1]])
    z = res.vectors[:, 1]
    np.testing.assert_allclose(T @ z, 2 * S @ z)


def test_generalized_identity_matches_standard(rng):
    T = np.triu(crandn(rng, 100, 100))
    a = triang_eig(T)
    b = generalized_triang_eig(T, np.eye(100))
    np.testing.assert_array_equal(a.lam, b.lam)
    assert np.abs(a.vectors - b.vectors).max() <= 1e-12 * np.abs(a.vectors).max()


def test_generalized_residual_and_back_transform(rng):
    m = 40
    T = np.triu(crandn(rng, m, m))
    S = np.triu(crandn(rng, m, m)) + 3 * np.eye(m)
    res = generalized_triang_eig(T, S)
    Z = normalize_columns(res.vectors)
    assert np.linalg.norm(T @ Z - (S @ Z) * res.lam) / np.linalg.norm(T) <= 1e-12
    P = np.linalg.qr(crandn(rng, m, m))[0]
    out = generalized_eig(T, S, P)
    np.testing.assert_allclose(out.vectors, P @ res.vectors, atol=1e-12 * np.abs(res.vectors).max())


def test_generalized_infinite_eigenvalue():
    with pytest.raises(InfiniteEigenvalueError):
        generalized_triang_eig(np.eye(2), np.diag([1.0, 0.0]))


def test_relative_residual_examples(rng):
    A = np.diag([1.0, 2.0])
    assert relative_residual(A, np.eye(2), [1, 2]) == 0
    A = crandn(rng, 5, 5)
    want = np.linalg.norm(A - np.diag(np.diagonal(A))) / np.linalg.norm(A)
    assert relative_residual(A, np.eye(5), np.diagonal(A)) == pytest.approx(want, rel=1e-14)
    with pytest.raises(ValueError):
        relative_residual(np.zeros((2, 2)), np.eye(2), [0, 0])


def test_relative_residual_perturbation(rng):
    A = crandn(rng, 20, 20)
    res = eig(A)
    X = normalize_columns(res.vectors)
    base = relative_residual(A, X, res.lam)
    eta = 1e-7
    Xp = X.copy()
    Xp[3, 4] += eta
    bound = eta * (np.linalg.norm(A, 2) + np.abs(res.lam).max()) / np.linalg.norm(A)
    assert abs(relative_residual(A, Xp, res.lam) - base) <= bound * 1.01
