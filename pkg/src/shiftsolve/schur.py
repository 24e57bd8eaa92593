"""Unblocked complex Schur factorization (Householder Hessenberg + shifted QR).

Correctness-oriented plumbing for the eigensolvers; nothing here is tuned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .dense import as_square


class SchurConvergenceError(RuntimeError):
    """The shifted QR iteration did not deflate within its iteration budget."""


@dataclass(frozen=True)
class SchurPair:
    """``A = q @ t @ q.conj().T`` with ``q`` unitary and ``t`` upper triangular."""

    q: np.ndarray
    t: np.ndarray

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.diagonal(self.t).copy()


@njit(cache=True)
def _hessenberg(A, Q):
    m = A.shape[0]
    v = np.zeros(m, dtype=np.complex128)
    w = np.zeros(m, dtype=np.complex128)
    for k in range(m - 2):
        tail = 0.0
        for i in range(k + 2, m):
            z = A[i, k]
            tail += z.real * z.real + z.imag * z.imag
        if tail == 0.0:
            continue
        x0 = A[k + 1, k]
        xnorm = math.sqrt(abs(x0) ** 2 + tail)
        phase = x0 / abs(x0) if x0 != 0 else complex(1.0, 0.0)
        alpha = -phase * xnorm
        v[k + 1] = x0 - alpha
        for i in range(k + 2, m):
            v[i] = A[i, k]
        tau = 2.0 / (abs(v[k + 1]) ** 2 + tail)
        # A <- H A on rows k+1:, columns k+1:
        for c in range(k + 1, m):
            acc = 0j
            for i in range(k + 1, m):
                acc += v[i].conjugate() * A[i, c]
            acc *= tau
            for i in range(k + 1, m):
                A[i, c] -= v[i] * acc
        A[k + 1, k] = alpha
        for i in range(k + 2, m):
            A[i, k] = 0
        # A <- A H and Q <- Q H on columns k+1:
        for M in (A, Q):
            for i in range(m):
                w[i] = 0
            for c in range(k + 1, m):
                vc = v[c]
                for i in range(m):
                    w[i] += M[i, c] * vc
            for c in range(k + 1, m):
                f = tau * v[c].conjugate()
                for i in range(m):
                    M[i, c] -= w[i] * f


@njit(cache=True)
def _givens(x, y):
    ay = abs(y)
    if ay == 0.0:
        return 1.0, 0j
    ax = abs(x)
    if ax == 0.0:
        return 0.0, y.conjugate() / ay
    r = math.hypot(ax, ay)
    return ax / r, (x / ax) * y.conjugate() / r


@njit(cache=True)
def _schur_qr(H, Q, maxit):
    """Single-shift QR sweeps with deflation; returns the iteration count or -1."""
    m = H.shape[0]
    eps = 2.220446049250313e-16
    hnorm = 0.0
    for c in range(m):
        for i in range(min(c + 2, m)):
            hnorm += abs(H[i, c]) ** 2
    hnorm = math.sqrt(hnorm)
    total = 0
    its = 0
    hi = m - 1
    while hi > 0:
        lo = hi
        while lo > 0:
            sub = abs(H[lo, lo - 1])
            tst = abs(H[lo, lo]) + abs(H[lo - 1, lo - 1])
            if tst == 0.0:
                tst = hnorm
            if sub <= eps * tst:
                H[lo, lo - 1] = 0
                break
            lo -= 1
        if lo == hi:
            hi -= 1
            its = 0
            continue
        total += 1
        its += 1
        if total > maxit:
            return -1
        d = H[hi, hi]
        if its % 10 == 0:
            mu = d + 0.75 * abs(H[hi, hi - 1])
        else:
            a = H[hi - 1, hi - 1]
            bc = H[hi - 1, hi] * H[hi, hi - 1]
            p = 0.5 * (a - d)
            disc = np.sqrt(p * p + bc)
            if abs(p + disc) < abs(p - disc):
                disc = -disc
            den = p + disc
            mu = d - bc / den if den != 0 else d
        x = H[lo, lo] - mu
        y = H[lo + 1, lo]
        for k in range(lo, hi):
            if k > lo:
                x = H[k, k - 1]
                y = H[k + 1, k - 1]
            c, s = _givens(x, y)
            sc = s.conjugate()
            for col in range(max(k - 1, lo), m):
                a = H[k, col]
                b = H[k + 1, col]
                H[k, col] = c * a + s * b
                H[k + 1, col] = c * b - sc * a
            if k > lo:
                H[k + 1, k - 1] = 0
            for row in range(min(k + 2, hi) + 1):
                a = H[row, k]
                b = H[row, k + 1]
                H[row, k] = c * a + sc * b
                H[row, k + 1] = c * b - s * a
            for row in range(m):
                a = Q[row, k]
                b = Q[row, k + 1]
                Q[row, k] = c * a + sc * b
                Q[row, k + 1] = c * b - s * a
    return total


def hessenberg_reduce(A) -> tuple[np.ndarray, np.ndarray]:
    """Householder reduction ``A = Q H Q^H`` with ``H`` upper Hessenberg.

    Columns whose subdiagonal tail is already zero are skipped, so a
    Hessenberg input comes back unchanged with ``Q = I``.
    """
    H = as_square(A).copy(order="F")
    Q = np.eye(H.shape[0], dtype=np.complex128, order="F")
    _hessenberg(H, Q)
    return H, Q


def schur_qr(H, Q=None, *, maxit: int | None = None) -> SchurPair:
    """Complex Schur form of an upper Hessenberg ``H`` by Wilkinson-shifted QR.

    Rotations are accumulated into ``Q`` (identity by default), so passing
    the ``Q`` from :func:`hessenberg_reduce` gives the Schur vectors of the
    original matrix. Raises :class:`SchurConvergenceError` after
    ``maxit`` (default ``30 m``) iterations without full deflation.
    """
    T = as_square(H).copy(order="F")
    m = T.shape[0]
    Q = np.eye(m, dtype=np.complex128, order="F") if Q is None else as_square(Q).copy(order="F")
    if Q.shape != T.shape:
        raise ValueError(f"Q{Q.shape} does not match H{T.shape}")
    if not np.all(np.isfinite(T)):
        raise ValueError("matrix has non-finite entries")
    maxit = 30 * m if maxit is None else maxit
    if _schur_qr(T, Q, maxit) < 0:
        raise SchurConvergenceError(f"QR iteration did not converge in {maxit} iterations")
    T[np.tril_indices(m, -1)] = 0
    return SchurPair(q=Q, t=T)


def schur(A) -> SchurPair:
    """Schur decomposition of a general square matrix."""
    H, Q = hessenberg_reduce(A)
    return schur_qr(H, Q)
