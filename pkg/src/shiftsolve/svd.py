"""One-sided (Hestenes) Jacobi singular values for small dense matrices."""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from .dense import as_matrix


@njit(cache=True)
def _jacobi_sweeps(A, tol, max_sweeps):
    m, n = A.shape
    for sweep in range(max_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                alpha = 0.0
                beta = 0.0
                gamma = 0j
                for i in range(m):
                    ap = A[i, p]
                    aq = A[i, q]
                    alpha += ap.real * ap.real + ap.imag * ap.imag
                    beta += aq.real * aq.real + aq.imag * aq.imag
                    gamma += ap.conjugate() * aq
                g = abs(gamma)
                if g == 0.0 or g <= tol * math.sqrt(alpha * beta):
                    continue
                rotated = True
                zeta = (beta - alpha) / (2.0 * g)
                t = 1.0 / (abs(zeta) + math.sqrt(1.0 + zeta * zeta))
                if zeta < 0:
                    t = -t
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = c * t
                # rotate a_p against the phase-aligned a_q
                ph = gamma / g
                for i in range(m):
                    ap = A[i, p]
                    aq = A[i, q] * ph.conjugate()
                    A[i, p] = c * ap - s * aq
                    A[i, q] = (s * ap + c * aq) * ph
        if not rotated:
            return sweep + 1
    return -1


def singular_values(A, *, tol: float | None = None, max_sweeps: int = 60) -> np.ndarray:
    """Singular values of ``A`` in descending order.

    Columns are orthogonalized by plane rotations until every pair is
    orthogonal to ``tol`` (default: machine epsilon times the column count);
    the singular values are then the column norms.
    """
    W = as_matrix(A, copy=True)
    if W.shape[1] > W.shape[0]:
        W = np.asfortranarray(W.conj().T)
    tol = np.finfo(np.float64).eps * max(W.shape[1], 1) if tol is None else tol
    if _jacobi_sweeps(W, tol, max_sweeps) < 0:
        raise RuntimeError(f"Jacobi SVD did not converge in {max_sweeps} sweeps")
    return np.sort(np.linalg.norm(W, axis=0))[::-1]
