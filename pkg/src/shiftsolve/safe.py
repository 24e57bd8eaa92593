"""Overflow-proof triangular solves.

A safe solve returns ``x`` together with a scale ``s`` so that
``(U - lam I) x = s b`` holds and no intermediate quantity reaches the
overflow threshold ``omega``. Rescaling factors are powers of two, which
keeps every rescale exact; ``s`` is therefore a product of powers of two.
When the exact solution is so large that even the smallest subnormal
scale cannot bring it below ``omega``, ``s`` underflows to 0 and ``x`` is a
(numerical) null vector of the shifted matrix, as in LAPACK's xLATRS.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

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
    offdiag_column_norms,
    prepare_rhs,
    upper_inf_norm,
)
from .multishift import as_shifts, full_lengths

_FINFO = np.finfo(np.float64)


@dataclass(frozen=True)
class SafeConfig:
    """Thresholds of the safeguarded solves.

    ``omega`` is rounded down to a power of two internally.
    """

    eps: float = float(_FINFO.eps)
    safe_min: float = float(_FINFO.tiny)
    omega: float = field(default=float(1.0 / (_FINFO.tiny / _FINFO.eps)))

    def __post_init__(self):
        if not (1.0 < self.omega < _FINFO.max):
            raise ValueError(f"omega must lie in (1, {_FINFO.max:g}), got {self.omega!r}")
        if not (0.0 < self.eps < 1.0 and 0.0 < self.safe_min < 1.0):
            raise ValueError("eps and safe_min must lie in (0, 1)")

    @property
    def log2_omega(self) -> int:
        return math.floor(math.log2(self.omega))

    def delta(self, norm: float) -> float:
        """Stand-in magnitude for an exactly zero diagonal entry."""
        if norm == 0.0:
            return self.eps
        return max(self.eps * norm, self.safe_min)


DEFAULT_CONFIG = SafeConfig()


def growth_precheck(U, norms, b_inf: float,
                    cfg: SafeConfig = DEFAULT_CONFIG) -> Literal["fast", "guarded"]:
    """Decide from worst-case growth bounds whether plain back substitution is safe.

    Returns ``"fast"`` when the bounds on the largest solution entry and
    on the remaining right-hand side both stay below ``omega``.
    """
    U = as_square(U)
    norms = np.ascontiguousarray(norms, dtype=np.float64)
    if b_inf == 0.0:
        return "fast"
    ok = _kernels.precheck(U, U.shape[0], norms, float(b_inf),
                           math.ldexp(1.0, -cfg.log2_omega))
    return "fast" if ok else "guarded"


def _deltas(unorm, shifts, cfg, vnorm=None):
    mags = np.abs(shifts) * (1.0 if vnorm is None else vnorm) + unorm
    return np.array([cfg.delta(float(v)) for v in mags])


def safe_trsv(U, b, norms=None, cfg: SafeConfig = DEFAULT_CONFIG, *,
              overwrite_b: bool = False) -> tuple[np.ndarray, float]:
    """Safeguarded back substitution for one right-hand side.

    Returns ``(x, s)`` with ``U x = s b``, ``0 <= s <= 1`` and every entry of
    ``x`` finite. Exactly zero diagonal entries are replaced by
    ``cfg.delta(||U||_inf)``. ``norms`` are the off-diagonal column norms
    of ``U`` and may be shared between calls.
    """
    U = as_square(U)
    X = prepare_rhs(U, b, overwrite_b)
    if X.shape[1] != 1:
        raise ShapeError("safe_trsv takes a single right-hand side")
    if not np.all(np.isfinite(X)):
        raise ValueError("right-hand side must be finite")
    if not np.any(X):
        raise ValueError("right-hand side must be nonzero")
    norms = offdiag_column_norms(U) if norms is None else np.ascontiguousarray(norms, dtype=np.float64)
    m = U.shape[0]
    # the norm is only needed to replace exact zeros on the diagonal
    delta = cfg.delta(upper_inf_norm(U)) if np.any(np.diagonal(U) == 0) else cfg.eps
    s = _kernels.safe_trsv_core(U, m, norms, delta, X, 0, 0, cfg.log2_omega)
    _flops.record("trsv", _flops.trsv_flops(m))
    return finish_rhs(b, X, overwrite_b), float(s)


def _safe_sweep(U, V, shifts, X, nb, lengths, cfg, deltas):
    """Safeguarded blocked back substitution; returns the per-column scales.

    ``lengths`` is non-decreasing and column ``j`` must be zero from row
    ``lengths[j]`` down; only its leading segment takes part in the solve.
    """
    m, n = X.shape
    gen = V is not None
    log2_omega = cfg.log2_omega
    s = np.ones(n)
    # rows at or below lengths[j] are zero by contract
    G = np.abs(X).max(axis=0)
    S = np.empty((nb, nb), dtype=np.complex128, order="F")
    C = np.empty((nb, n), dtype=np.complex128, order="F") if gen else S
    Vk = V if gen else U
    blocknorms = np.zeros(nb)
    snorm = np.zeros(nb)
    for i0, i1 in block_ranges(m, nb):
        j0 = int(np.searchsorted(lengths, i0, side="right"))
        if j0 == n:
            continue
        if not gen:
            _kernels.offdiag_norms(U, i0, i1, blocknorms)
        _kernels.safe_diag_block(U, Vk, gen, i0, i1, shifts, lengths, j0, deltas,
                                 blocknorms, X, C, S, snorm, s, G, log2_omega)
        if _flops.recording():
            _flops.record("trsv", _flops.trsv_flops(np.minimum(lengths[j0:] - i0, i1 - i0)))
        if not i0:
            continue
        panel_u = float(np.abs(U[:i0, i0:i1]).max(axis=0).sum())
        panel_v = float(np.abs(V[:i0, i0:i1]).max(axis=0).sum()) if gen else 0.0
        _kernels.outer_growth(X, i0, i1, lengths, j0, panel_u, panel_v, gen, shifts,
                              s, G, log2_omega)
        cols = slice(j0, n)
        _gemm(X[:i0, cols], U[:i0, i0:i1], X[i0:i1, cols])
        if gen:
            _gemm(X[:i0, cols], V[:i0, i0:i1], C[: i1 - i0, cols], alpha=1.0)
    return s


def _check_rhs(X):
    if not np.all(np.isfinite(X)):
        raise ValueError("right-hand sides must be finite")
    zero = ~np.any(X, axis=0)
    if np.any(zero):
        raise ValueError(f"right-hand side columns {np.flatnonzero(zero).tolist()} are zero")


def safe_multishift_trsm(U, shifts, B, cfg: SafeConfig = DEFAULT_CONFIG,
                         nb: int = DEFAULT_BLOCK_SIZE, *,
                         overwrite_b: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Safeguarded blocked solve of ``(U - shifts[j] I) x_j = s_j b_j``.

    Returns ``(X, s)``. Every column of ``B`` must be nonzero.
    """
    nb = check_block_size(nb)
    U = as_square(U)
    X = prepare_rhs(U, B, overwrite_b)
    lam = as_shifts(shifts, X.shape[1])
    _check_rhs(X)
    s = np.ones(X.shape[1])
    if X.size:
        deltas = _deltas(upper_inf_norm(U), lam, cfg)
        s = _safe_sweep(U, None, lam, X, nb, full_lengths(*X.shape), cfg, deltas)
    return finish_rhs(B, X, overwrite_b), s


def safe_generalized_multishift_trsm(U, V, shifts, B, cfg: SafeConfig = DEFAULT_CONFIG,
                                     nb: int = DEFAULT_BLOCK_SIZE, *,
                                     overwrite_b: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Safeguarded blocked solve of ``(U - shifts[j] V) x_j = s_j b_j``."""
    nb = check_block_size(nb)
    U = as_square(U)
    V = as_square(V)
    if V.shape != U.shape:
        raise ShapeError(f"U{U.shape} and V{V.shape} differ in shape")
    X = prepare_rhs(U, B, overwrite_b)
    lam = as_shifts(shifts, X.shape[1])
    _check_rhs(X)
    s = np.ones(X.shape[1])
    if X.size:
        deltas = _deltas(upper_inf_norm(U), lam, cfg, upper_inf_norm(V))
        s = _safe_sweep(U, V, lam, X, nb, full_lengths(*X.shape), cfg, deltas)
    return finish_rhs(B, X, overwrite_b), s


def reversed_adjoint(U) -> np.ndarray:
    """Upper triangular ``P U^H P`` with ``P`` the reversal permutation.

    Forward substitution with the lower triangular ``U^H`` is back
    substitution with this matrix on reversed vectors.
    """
    U = as_square(U)
    return np.asfortranarray(np.triu(U).conj().T[::-1, ::-1])


def safe_multishift_trsm_adjoint(U, shifts, B, cfg: SafeConfig = DEFAULT_CONFIG,
                                 nb: int = DEFAULT_BLOCK_SIZE, *, reversed_u=None,
                                 overwrite_b: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Safeguarded solve of ``(U - shifts[j] I)^H x_j = s_j b_j`` by forward substitution.

    ``reversed_u`` may pass a precomputed :func:`reversed_adjoint` of ``U``
    when many solves share the same matrix.
    """
    R = reversed_adjoint(U) if reversed_u is None else reversed_u
    Xr, s = safe_multishift_trsm(R, np.conj(np.asarray(shifts, dtype=np.complex128)),
                                 np.asarray(B)[::-1], cfg, nb)
    X = Xr[::-1]
    if overwrite_b and isinstance(B, np.ndarray):
        B[...] = X
    return X, s
