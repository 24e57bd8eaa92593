"""Blocked multi-shift triangular solves (unprotected fast path)."""

from __future__ import annotations

import numpy as np

from . import _flops, _kernels
from .dense import (
    DEFAULT_BLOCK_SIZE,
    ShapeError,
    _gemm,
    as_square,
    block_ranges,
    check_block_size,
    finish_rhs,
    prepare_rhs,
)


def as_shifts(shifts, n: int) -> np.ndarray:
    """Validate a shift set against a right-hand side with ``n`` columns."""
    lam = np.atleast_1d(np.asarray(shifts, dtype=np.complex128))
    if lam.ndim != 1 or lam.shape[0] != n:
        raise ShapeError(f"expected {n} shifts, got shape {np.shape(shifts)}")
    return np.ascontiguousarray(lam)


def full_lengths(m: int, n: int) -> np.ndarray:
    return np.full(n, m, dtype=np.int64)


def _sweep(U, V, shifts, X, nb, lengths):
    """Blocked back substitution shared by the standard and generalized solves.

    ``lengths`` (non-decreasing) limits column ``j`` to its leading
    ``lengths[j]`` rows; columns whose segment ends above a block take no
    part in that block's work.
    """
    m, n = X.shape
    gen = V is not None
    S = np.empty((nb, nb), dtype=np.complex128, order="F")
    C = np.empty((nb, n), dtype=np.complex128, order="F") if gen else S
    Vk = V if gen else U
    for i0, i1 in block_ranges(m, nb):
        j0 = int(np.searchsorted(lengths, i0, side="right"))
        if j0 == n:
            continue
        _kernels.diag_block_solve(U, Vk, gen, i0, i1, shifts, lengths, j0, X, C, S)
        if _flops.recording():
            _flops.record("trsv", _flops.trsv_flops(np.minimum(lengths[j0:] - i0, i1 - i0)))
        if i0:
            cols = slice(j0, n)
            _gemm(X[:i0, cols], U[:i0, i0:i1], X[i0:i1, cols])
            if gen:
                _gemm(X[:i0, cols], V[:i0, i0:i1], C[: i1 - i0, cols], alpha=1.0)


def multishift_trsm(U, shifts, B, nb: int = DEFAULT_BLOCK_SIZE, *,
                    overwrite_b: bool = False) -> np.ndarray:
    """Solve ``(U - shifts[j] I) x_j = b_j`` for every column of ``B``.

    Parameters
    ----------
    U : (m, m) array_like
        Upper triangular; the strict lower triangle is ignored.
    shifts : (n,) array_like
        One complex shift per right-hand side.
    B : (m, n) or (m,) array_like
        Right-hand sides.
    nb : int
        Block size of the back substitution.
    overwrite_b : bool
        Reuse ``B``'s storage for the result when it is a column-major
        complex128 array (otherwise the result is copied back into ``B``).

    Returns
    -------
    X : ndarray
        The solutions. A shift equal to a diagonal entry of ``U`` yields
        infinities; use :func:`shiftsolve.safe.safe_multishift_trsm` when
        that can happen.
    """
    nb = check_block_size(nb)
    U = as_square(U)
    X = prepare_rhs(U, B, overwrite_b)
    lam = as_shifts(shifts, X.shape[1])
    if X.size:
        with np.errstate(all="ignore"):
            _sweep(U, None, lam, X, nb, full_lengths(*X.shape))
    return finish_rhs(B, X, overwrite_b)


def generalized_multishift_trsm(U, V, shifts, B, nb: int = DEFAULT_BLOCK_SIZE, *,
                                overwrite_b: bool = False) -> np.ndarray:
    """Solve ``(U - shifts[j] V) x_j = b_j`` for upper triangular ``U`` and ``V``.

    The substitution step is two matrix products per block: one with the
    off-diagonal panel of ``U`` and one with that of ``V`` against the
    shift-scaled block solution.
    """
    nb = check_block_size(nb)
    U = as_square(U)
    V = as_square(V)
    if V.shape != U.shape:
        raise ShapeError(f"U{U.shape} and V{V.shape} differ in shape")
    X = prepare_rhs(U, B, overwrite_b)
    lam = as_shifts(shifts, X.shape[1])
    if X.size:
        with np.errstate(all="ignore"):
            _sweep(U, V, lam, X, nb, full_lengths(*X.shape))
    return finish_rhs(B, X, overwrite_b)
