"""Dense storage helpers, norms and the basic triangular kernels.

Matrices are plain ``numpy`` arrays of ``complex128`` in column-major
(Fortran) order; slicing gives aliasing sub-views. Triangular operands are
read from their upper triangle only, whatever the strict lower triangle
holds.
"""

from __future__ import annotations

import numpy as np

from . import _flops, _kernels
from ._blas import zgemm_inplace

DEFAULT_BLOCK_SIZE = 64


class ShapeError(ValueError):
    """Operand shapes violate an operation's contract."""


def as_matrix(a, *, copy: bool = False) -> np.ndarray:
    """Return ``a`` as a 2-D column-major complex128 array."""
    out = np.array(a, dtype=np.complex128, order="F", copy=copy or None, ndmin=2)
    if out.ndim != 2:
        raise ShapeError(f"expected a matrix, got {out.ndim}-d input")
    return out


def as_square(a) -> np.ndarray:
    out = as_matrix(a)
    if out.shape[0] != out.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {out.shape}")
    return out


def check_block_size(nb: int) -> int:
    nb = int(nb)
    if nb < 1:
        raise ValueError(f"block size must be >= 1, got {nb}")
    return nb


def block_ranges(m: int, nb: int) -> list[tuple[int, int]]:
    """Diagonal blocks ``(i0, i1)`` in back-substitution order.

    Blocks are taken from the bottom in steps of ``nb``; when ``nb`` does
    not divide ``m`` the topmost block is the short one.
    """
    nb = check_block_size(nb)
    ranges = []
    i1 = m
    while i1 > 0:
        i0 = max(i1 - nb, 0)
        ranges.append((i0, i1))
        i1 = i0
    return ranges


def upper_inf_norm(U: np.ndarray) -> float:
    """Infinity norm of the upper triangle of ``U``."""
    if U.size == 0:
        return 0.0
    return float(_kernels.upper_row_sums(U).max())


def is_upper_triangular(a: np.ndarray) -> bool:
    return not np.any(np.tril(a, -1))


def _gemm(C, A, B, alpha=-1.0, beta=1.0):
    # no validation: internal substitution step on views of one array
    if A.shape[1] == 0 or C.size == 0:
        if beta != 1:
            C *= beta
        return
    _flops.record("gemm", _flops.MAC * C.shape[0] * C.shape[1] * A.shape[1])
    if zgemm_inplace(C, A, B, alpha, beta):
        return
    if beta == 1 and alpha == -1:
        C -= A @ B
    elif beta == 1 and alpha == 1:
        C += A @ B
    elif beta == 0:
        C[...] = alpha * (A @ B)
    else:
        C *= beta
        C += alpha * (A @ B)


def gemm_update(C: np.ndarray, A: np.ndarray, B: np.ndarray,
                alpha: complex = 1.0, beta: complex = 0.0) -> None:
    """In place ``C := alpha*A@B + beta*C``.

    With ``beta == 0`` the old contents of ``C`` are ignored (as in BLAS).
    The product itself is delegated to the BLAS behind numpy.
    """
    if A.ndim != 2 or B.ndim != 2 or C.ndim != 2:
        raise ShapeError("gemm_update operands must be 2-D")
    m, k = A.shape
    if B.shape[0] != k or C.shape != (m, B.shape[1]):
        raise ShapeError(
            f"gemm_update shape mismatch: C{C.shape} A{A.shape} B{B.shape}")
    if np.shares_memory(C, A) or np.shares_memory(C, B):
        raise ValueError("gemm_update output must not alias its inputs")
    _gemm(C, A, B, alpha, beta)


def offdiag_column_norms(U) -> np.ndarray:
    """Infinity norms of the strictly upper part of each column of ``U``.

    Entry ``k`` is ``max |U[:k, k]|``; entry 0 is always 0.
    """
    U = as_square(U)
    m = U.shape[0]
    out = np.zeros(m)
    if m:
        _kernels.offdiag_norms(U, 0, m, out)
    return out


def trsv_unblocked(U, b, *, overwrite_b: bool = False) -> np.ndarray:
    """Solve ``U x = b`` by plain column-oriented back substitution.

    This is the unprotected path: a zero on the diagonal produces
    infinities or NaNs rather than an error.
    """
    U = as_square(U)
    x = np.array(b, dtype=np.complex128, copy=not overwrite_b or None)
    if x.ndim != 1 or x.shape[0] != U.shape[0]:
        raise ShapeError(f"rhs of length {U.shape[0]} expected, got shape {x.shape}")
    with np.errstate(all="ignore"):
        _kernels.trsv_upper(U, x)
    _flops.record("trsv", _flops.trsv_flops(U.shape[0]))
    if overwrite_b and x is not b:
        b[...] = x
    return x


def prepare_rhs(U: np.ndarray, B, overwrite_b: bool) -> np.ndarray:
    """Column-major complex working copy of ``B`` (or ``B`` itself when allowed)."""
    X = np.asarray(B)
    vector = X.ndim == 1
    if vector:
        X = X[:, None]
    if X.ndim != 2 or X.shape[0] != U.shape[0]:
        raise ShapeError(f"rhs with {U.shape[0]} rows expected, got shape {np.shape(B)}")
    if overwrite_b and X.dtype == np.complex128 and X.flags.f_contiguous and X.flags.writeable:
        return X
    return np.array(X, dtype=np.complex128, order="F")


def finish_rhs(B, X: np.ndarray, overwrite_b: bool) -> np.ndarray:
    if np.ndim(B) == 1:
        X = X[:, 0]
    if overwrite_b and isinstance(B, np.ndarray) and not np.shares_memory(B, X):
        B[...] = X
    return X


def trsm_blocked(U, B, nb: int = DEFAULT_BLOCK_SIZE, *,
                 overwrite_b: bool = False) -> np.ndarray:
    """Solve ``U X = B`` with blocked back substitution.

    Each diagonal block is solved column by column; everything above the
    block is updated with a single matrix product.
    """
    nb = check_block_size(nb)
    U = as_square(U)
    X = prepare_rhs(U, B, overwrite_b)
    m, n = X.shape
    if m and n:
        with np.errstate(all="ignore"):
            for i0, i1 in block_ranges(m, nb):
                _kernels.trsm_diag_block(U, i0, i1, X)
                _flops.record("trsv", n * _flops.trsv_flops(i1 - i0))
                if i0:
                    _gemm(X[:i0], U[:i0, i0:i1], X[i0:i1])
    return finish_rhs(B, X, overwrite_b)
