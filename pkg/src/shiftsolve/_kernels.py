"""Compiled inner loops for the triangular solvers.

All matrices are complex128 and column-major. Kernels take the full
arrays plus row/column offsets rather than sliced views, so each kernel
compiles once per layout. Only the upper triangle of ``U``/``V`` is read.
"""

import math

import numpy as np
from numba import njit


@njit(cache=True, error_model="numpy")
def _abs2(z):
    return z.real * z.real + z.imag * z.imag


@njit(cache=True, error_model="numpy")
def _cdiv(a, b):
    # numba's complex division raises on a zero divisor; the unsafe paths want inf/nan
    if b == 0:
        return complex(a.real / b.real, a.imag / b.real)
    return a / b


@njit(cache=True, error_model="numpy")
def _pow2_floor(e):
    return math.ldexp(1.0, int(math.floor(e)))


@njit(cache=True, error_model="numpy")
def trsv_upper(U, b):
    """Back substitution on the full upper triangle of ``U``; ``b`` overwritten."""
    m = b.shape[0]
    for i in range(m - 1, -1, -1):
        xi = _cdiv(b[i], U[i, i])
        b[i] = xi
        if xi != 0:
            for k in range(i):
                b[k] -= xi * U[k, i]


@njit(cache=True, error_model="numpy")
def trsm_diag_block(U, i0, i1, B):
    """Unshifted back substitution of rows ``i0:i1`` of every column of ``B``."""
    for j in range(B.shape[1]):
        for i in range(i1 - 1, i0 - 1, -1):
            xi = _cdiv(B[i, j], U[i, i])
            B[i, j] = xi
            if xi != 0:
                for k in range(i0, i):
                    B[k, j] -= xi * U[k, i]


@njit(cache=True, error_model="numpy")
def _form_shifted(U, V, gen, i0, r, lam, S):
    # upper triangle of U(i0:i0+r, i0:i0+r) - lam * (V or I) into S
    for c in range(r):
        if gen:
            for k in range(c + 1):
                S[k, c] = U[i0 + k, i0 + c] - lam * V[i0 + k, i0 + c]
        else:
            for k in range(c + 1):
                S[k, c] = U[i0 + k, i0 + c]
            S[c, c] -= lam


@njit(cache=True, error_model="numpy")
def diag_block_solve(U, V, gen, i0, i1, shifts, lengths, j0, B, C, S):
    """Shifted diagonal-block step for columns ``j0:``.

    Column ``j`` only involves its leading ``lengths[j]`` rows. When ``gen``
    is true the block is ``U - lam V`` and ``C(:, j) = lam * B(I1, j)`` is
    staged for the second substitution product.
    """
    nbk = i1 - i0
    for j in range(j0, B.shape[1]):
        r = min(lengths[j] - i0, nbk)
        if r <= 0:
            continue
        lam = shifts[j]
        _form_shifted(U, V, gen, i0, r, lam, S)
        for i in range(r - 1, -1, -1):
            xi = _cdiv(B[i0 + i, j], S[i, i])
            B[i0 + i, j] = xi
            if xi != 0:
                for k in range(i):
                    B[i0 + k, j] -= xi * S[k, i]
        if gen:
            for i in range(r):
                C[i, j] = lam * B[i0 + i, j]
            for i in range(r, nbk):
                C[i, j] = 0


@njit(cache=True, error_model="numpy")
def offdiag_norms(U, i0, i1, out):
    """``out[c] = max |U(i0:i0+c, i0+c)|`` for the block starting at ``i0``."""
    for c in range(i1 - i0):
        v = 0.0
        for k in range(i0, i0 + c):
            a = abs(U[k, i0 + c])
            if a > v:
                v = a
        out[c] = v


@njit(cache=True, error_model="numpy")
def precheck(S, r, norms, bnorm, romega):
    """True when the worst-case growth of a solve with ``S(:r, :r)`` stays below 1/romega.

    Works on reciprocals so the bookkeeping itself cannot overflow.
    """
    rm = np.inf
    rg = 1.0 / bnorm
    for i in range(r - 1, -1, -1):
        d = abs(S[i, i])
        if d == 0.0:
            return False
        rm = min(rm, d * rg)
        rg = rg / (1.0 + norms[i] / d)
        if not (rm > romega and rg > romega):
            return False
    return True


@njit(cache=True, error_model="numpy")
def _scale_col(B, j, lo, hi, t):
    for i in range(lo, hi):
        B[i, j] *= t


@njit(cache=True, error_model="numpy")
def safe_trsv_core(S, r, norms, delta, B, j, off, log2_omega):
    """Safeguarded back substitution on ``B(off:off+r, j)``; returns the scale.

    Rescale factors are powers of two, so applying them is exact and the
    returned scale is a product of powers of two.
    """
    omega = math.ldexp(1.0, log2_omega)
    bnorm = 0.0
    for i in range(r):
        a = abs(B[off + i, j])
        if a > bnorm:
            bnorm = a
    if bnorm == 0.0:
        return 1.0
    if precheck(S, r, norms, bnorm, 1.0 / omega):
        for i in range(r - 1, -1, -1):
            xi = B[off + i, j] / S[i, i]
            B[off + i, j] = xi
            if xi != 0:
                for k in range(i):
                    B[off + k, j] -= xi * S[k, i]
        return 1.0

    scale = 1.0
    g = bnorm
    for i in range(r - 1, -1, -1):
        uii = S[i, i]
        d = abs(uii)
        if d == 0.0:
            uii = complex(delta, 0.0)
            d = delta
        bi = abs(B[off + i, j])
        if bi >= d * omega:
            t = _pow2_floor(log2_omega - 1 - (math.log2(bi) - math.log2(d)))
            _scale_col(B, j, off, off + r, t)
            scale *= t
            g *= t
            mi = (t * bi) / d
        else:
            mi = bi / d
        xi = B[off + i, j] / uii
        B[off + i, j] = xi
        c = norms[i]
        gn = g + mi * c
        if not (gn < omega):
            lb = max(math.log2(g), math.log2(mi) + math.log2(c)) + 1.0
            t = _pow2_floor(log2_omega - 1 - lb)
            _scale_col(B, j, off, off + r, t)
            scale *= t
            g *= t
            mi *= t
            xi = B[off + i, j]
            gn = g + mi * c
        g = gn
        if xi != 0:
            for k in range(i):
                B[off + k, j] -= xi * S[k, i]
    return scale


@njit(cache=True, error_model="numpy")
def safe_diag_block(U, V, gen, i0, i1, shifts, lengths, j0, deltas,
                    blocknorms, B, C, S, snorm, s, G, log2_omega):
    """Safeguarded diagonal-block step; inner rescales are applied to the whole column."""
    nbk = i1 - i0
    m = B.shape[0]
    for j in range(j0, B.shape[1]):
        r = min(lengths[j] - i0, nbk)
        if r <= 0:
            continue
        lam = shifts[j]
        _form_shifted(U, V, gen, i0, r, lam, S)
        if gen:
            for c in range(r):
                v = 0.0
                for k in range(c):
                    a = abs(S[k, c])
                    if a > v:
                        v = a
                snorm[c] = v
            t = safe_trsv_core(S, r, snorm, deltas[j], B, j, i0, log2_omega)
        else:
            t = safe_trsv_core(S, r, blocknorms, deltas[j], B, j, i0, log2_omega)
        if t < 1.0:
            _scale_col(B, j, 0, i0, t)
            _scale_col(B, j, i0 + r, m, t)
            s[j] *= t
            G[j] *= t
        if gen:
            for i in range(r):
                C[i, j] = lam * B[i0 + i, j]
            for i in range(r, nbk):
                C[i, j] = 0


@njit(cache=True, error_model="numpy")
def outer_growth(B, i0, i1, lengths, j0, panel_u, panel_v, gen, shifts,
                 s, G, log2_omega):
    """Advance the per-column bound on ``B(I0, j)`` ahead of the gemm step."""
    omega = math.ldexp(1.0, log2_omega)
    nbk = i1 - i0
    m = B.shape[0]
    for j in range(j0, B.shape[1]):
        r = min(lengths[j] - i0, nbk)
        if r <= 0:
            continue
        bn = 0.0
        for i in range(i0, i0 + r):
            a = abs(B[i, j])
            if a > bn:
                bn = a
        ps = panel_u
        if gen:
            ps += abs(shifts[j]) * panel_v
        gn = G[j] + ps * bn
        if not (gn < omega):
            lb = max(math.log2(G[j]), math.log2(ps) + math.log2(bn)) + 1.0
            t = _pow2_floor(log2_omega - 1 - lb)
            _scale_col(B, j, 0, m, t)
            s[j] *= t
            G[j] *= t
            bn *= t
            gn = G[j] + ps * bn
        G[j] = gn


@njit(cache=True, error_model="numpy")
def upper_row_sums(U):
    m = U.shape[0]
    out = np.zeros(m)
    for c in range(m):
        for k in range(c + 1):
            out[k] += abs(U[k, c])
    return out
