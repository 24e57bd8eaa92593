"""Eigenvectors from safeguarded multi-shift triangular solves."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dense import DEFAULT_BLOCK_SIZE, ShapeError, _gemm, as_square, check_block_size, upper_inf_norm
from .safe import DEFAULT_CONFIG, SafeConfig, _deltas, _safe_sweep
from .schur import SchurConvergenceError, SchurPair, hessenberg_reduce, schur, schur_qr

__all__ = [
    "EigenDecomposition",
    "InfiniteEigenvalueError",
    "SchurConvergenceError",
    "SchurPair",
    "eig",
    "generalized_eig",
    "generalized_triang_eig",
    "hessenberg_reduce",
    "normalize_columns",
    "relative_residual",
    "schur",
    "schur_qr",
    "triang_eig",
]


class InfiniteEigenvalueError(ValueError):
    """A pencil has a zero on the diagonal of ``S`` (infinite eigenvalue)."""


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues ``lam`` and eigenvector columns ``vectors``.

    ``scales`` holds the safe-solve scale of each column; for a
    triangular input it is also the diagonal of ``vectors``.
    """

    lam: np.ndarray
    vectors: np.ndarray
    scales: np.ndarray


def _triangular_vectors(T, S, lam, cfg, nb):
    m = T.shape[0]
    Z = np.asfortranarray(np.triu(-T, 1))
    if S is not None:
        Z += np.triu(S, 1) * lam
    lengths = np.arange(m, dtype=np.int64)
    if S is None:
        deltas = _deltas(upper_inf_norm(T), lam, cfg)
    else:
        deltas = _deltas(upper_inf_norm(T), lam, cfg, upper_inf_norm(S))
    # column k only has rows 0..k-1 in play, so the solve is shortcut per column
    s = _safe_sweep(T, S, lam, Z, nb, lengths, cfg, deltas) if m else np.ones(0)
    Z[np.diag_indices(m)] = s
    return Z, s


def triang_eig(T, cfg: SafeConfig = DEFAULT_CONFIG,
               nb: int = DEFAULT_BLOCK_SIZE) -> EigenDecomposition:
    """Eigenvectors of an upper triangular matrix.

    Returns upper triangular ``Z`` with ``T Z = Z diag(lam)``. Column ``k``
    comes from a safe solve with shift ``T[k, k]`` against ``-T[:k, k]``;
    the resulting scale sits on the diagonal. Columns are not normalized.
    """
    nb = check_block_size(nb)
    T = as_square(T)
    lam = np.diagonal(T).copy()
    Z, s = _triangular_vectors(T, None, lam, cfg, nb)
    return EigenDecomposition(lam=lam, vectors=Z, scales=s)


def eig(A, cfg: SafeConfig = DEFAULT_CONFIG, nb: int = DEFAULT_BLOCK_SIZE) -> EigenDecomposition:
    """Eigenvalues and eigenvectors of a general square matrix.

    Schur factorization ``A = Q T Q^H``, triangular eigenvectors ``Z`` of
    ``T``, then ``X = Q Z``.
    """
    pair = schur(A)
    tri = triang_eig(pair.t, cfg, nb)
    m = pair.q.shape[0]
    X = np.zeros((m, m), dtype=np.complex128, order="F")
    _gemm(X, pair.q, tri.vectors, alpha=1.0, beta=0.0)
    return EigenDecomposition(lam=tri.lam, vectors=X, scales=tri.scales)


def generalized_triang_eig(T, S, cfg: SafeConfig = DEFAULT_CONFIG,
                           nb: int = DEFAULT_BLOCK_SIZE) -> EigenDecomposition:
    """Eigenvectors of the triangular pencil ``T z = lam S z``.

    ``S`` must have a nonzero diagonal (all eigenvalues finite).
    """
    nb = check_block_size(nb)
    T = as_square(T)
    S = as_square(S)
    if S.shape != T.shape:
        raise ShapeError(f"T{T.shape} and S{S.shape} differ in shape")
    dS = np.diagonal(S)
    if np.any(dS == 0):
        raise InfiniteEigenvalueError(
            f"S has zero diagonal entries at {np.flatnonzero(dS == 0).tolist()}")
    lam = np.diagonal(T) / dS
    Z, s = _triangular_vectors(T, S, lam, cfg, nb)
    return EigenDecomposition(lam=lam, vectors=Z, scales=s)


def generalized_eig(T, S, P, cfg: SafeConfig = DEFAULT_CONFIG,
                    nb: int = DEFAULT_BLOCK_SIZE) -> EigenDecomposition:
    """Pencil eigenvectors from a precomputed generalized Schur form.

    Given ``A = Q T P^H`` and ``B = Q S P^H``, returns ``X = P Z``.
    """
    tri = generalized_triang_eig(T, S, cfg, nb)
    P = as_square(P)
    X = np.zeros(P.shape, dtype=np.complex128, order="F")
    _gemm(X, P, tri.vectors, alpha=1.0, beta=0.0)
    return EigenDecomposition(lam=tri.lam, vectors=X, scales=tri.scales)


def relative_residual(A, X, lam) -> float:
    """``||A X - X diag(lam)||_F / ||A||_F``."""
    A = np.asarray(A)
    X = np.asarray(X)
    lam = np.asarray(lam)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or X.shape[0] != A.shape[1] \
            or lam.shape != (X.shape[1],):
        raise ShapeError(f"incompatible shapes A{A.shape} X{X.shape} lam{lam.shape}")
    na = np.linalg.norm(A)
    if na == 0:
        raise ValueError("relative residual undefined for A = 0")
    return float(np.linalg.norm(A @ X - X * lam) / na)


def normalize_columns(X, ord=np.inf) -> np.ndarray:
    """Copy of ``X`` with every nonzero column scaled to unit ``ord``-norm."""
    X = np.array(X, dtype=np.complex128)
    norms = np.linalg.norm(X, ord=ord, axis=0)
    norms[norms == 0] = 1.0
    return X / norms
