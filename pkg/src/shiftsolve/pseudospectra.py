"""Resolvent norms ``||(zI - A)^{-1}||_2`` over shift sets and grids.

The matrix is reduced to Schur form once; per shift, the largest
eigenvalue of ``(T - zI)^{-H} (T - zI)^{-1}`` is estimated by Lanczos with
full reorthogonalization. Every Lanczos step applies the operator to all
active shifts at once through two safe multi-shift triangular solves.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dense import DEFAULT_BLOCK_SIZE, as_square, check_block_size, is_upper_triangular, upper_inf_norm
from .safe import DEFAULT_CONFIG, SafeConfig, _deltas, _safe_sweep, reversed_adjoint
from .multishift import full_lengths
from .schur import schur
from .svd import singular_values

DEFAULT_TOL = 1e-6
DEFAULT_MAXIT = 32
BATCH_MAX = 256


@dataclass(frozen=True)
class GridSpec:
    """``nx`` by ``ny`` cell-centred grid on a ``width`` by ``height`` window."""

    center: complex
    width: float
    height: float
    nx: int
    ny: int

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1:
            raise ValueError(f"grid needs nx, ny >= 1, got {self.nx}x{self.ny}")
        if not (self.width > 0 and self.height > 0):
            raise ValueError("grid width and height must be positive")

    def real_axis(self) -> np.ndarray:
        a = np.arange(self.nx)
        return complex(self.center).real + ((a + 0.5) / self.nx - 0.5) * self.width

    def imag_axis(self) -> np.ndarray:
        b = np.arange(self.ny)
        return complex(self.center).imag + ((b + 0.5) / self.ny - 0.5) * self.height

    def points(self) -> np.ndarray:
        """Grid points as a ``(ny, nx)`` array; row ``b`` has fixed imaginary part."""
        return self.real_axis()[None, :] + 1j * self.imag_axis()[:, None]


@dataclass(frozen=True)
class CloudResult:
    """Per-shift resolvent norm estimates with convergence metadata."""

    values: np.ndarray
    iterations: np.ndarray
    converged: np.ndarray
    history: np.ndarray | None = None


@dataclass(frozen=True)
class ResolventField:
    """Resolvent norms on a grid, stored row-major as ``(ny, nx)`` arrays."""

    grid: GridSpec
    values: np.ndarray
    iterations: np.ndarray
    converged: np.ndarray

    def points(self) -> np.ndarray:
        return self.grid.points()


def resolvent_cap(T) -> float:
    """Value reported where ``T - zI`` is numerically singular."""
    norm = upper_inf_norm(T)
    return 1.0 / (np.finfo(np.float64).eps * (norm if norm > 0 else 1.0))


def _inverse_upper(M):
    # plain row-by-row back substitution on the identity, independent of the blocked kernels
    m = M.shape[0]
    X = np.eye(m, dtype=np.complex128)
    for i in range(m - 1, -1, -1):
        X[i] /= M[i, i]
        X[:i] -= np.outer(M[:i, i], X[i])
    return X


def resolvent_norm_reference(T, z: complex) -> float:
    """``1 / sigma_min(T - zI)`` from dense Jacobi SVDs, capped at :func:`resolvent_cap`.

    Jacobi on ``T - zI`` fixes ``sigma_min`` only to about ``eps * sigma_max``
    in absolute terms. When ``T - zI`` is ill conditioned the value is taken
    instead from the largest singular value of its explicit inverse, which
    Jacobi delivers to full relative accuracy.
    """
    T = as_square(T)
    cap = resolvent_cap(T)
    m = T.shape[0]
    if m == 0:
        return 0.0
    M = np.triu(T) - z * np.eye(m)
    sv = singular_values(M)
    smax, smin = sv[0], sv[-1]
    if smin * cap <= 1.0 or not np.all(np.diagonal(M)):
        return cap
    if smin > 1e-4 * smax:
        return 1.0 / smin
    with np.errstate(over="ignore", invalid="ignore"):
        inv = _inverse_upper(M)
    if not np.all(np.isfinite(inv)):
        return cap
    return min(float(singular_values(inv)[0]), cap)


def _start_vector(m: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    return v / np.linalg.norm(v)


class _Operator:
    """Batched ``(T - zI)^{-H} (T - zI)^{-1}`` up to per-column powers of two."""

    def __init__(self, T, cfg, nb):
        self.T = T
        self.R = reversed_adjoint(T)
        self.cfg = cfg
        self.nb = nb
        self.norm = upper_inf_norm(T)
        self.rnorm = upper_inf_norm(self.R)

    def apply(self, z: np.ndarray, V: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Return ``W`` and ``log2 s`` with ``W[:, j] = s_j K_j V[:, j]``."""
        m, n = V.shape
        Y = np.array(V, order="F")
        lengths = full_lengths(m, n)
        s1 = _safe_sweep(self.T, None, z, Y, self.nb, lengths, self.cfg,
                         _deltas(self.norm, z, self.cfg))
        W = np.asfortranarray(Y[::-1])
        zc = np.conj(z)
        s2 = _safe_sweep(self.R, None, zc, W, self.nb, lengths, self.cfg,
                         _deltas(self.rnorm, zc, self.cfg))
        with np.errstate(divide="ignore"):
            return W[::-1], np.log2(s1) + np.log2(s2)


def _largest_ritz(alpha, beta, k):
    """Largest eigenvalue of each ``k`` by ``k`` Lanczos tridiagonal."""
    n = alpha.shape[0]
    Tk = np.zeros((n, k, k))
    idx = np.arange(k)
    Tk[:, idx, idx] = alpha[:, :k]
    if k > 1:
        Tk[:, idx[:-1], idx[1:]] = beta[:, : k - 1]
        Tk[:, idx[1:], idx[:-1]] = beta[:, : k - 1]
    return np.linalg.eigvalsh(Tk)[:, -1]


def _cloud_batch(op, z, tol, maxit, v0, cap, hist=None):
    m = v0.shape[0]
    n = z.shape[0]
    kmax = min(maxit, m)
    basis = np.zeros((n, kmax + 1, m), dtype=np.complex128)
    alpha = np.zeros((n, kmax))
    beta = np.zeros((n, kmax))
    theta = np.zeros(n)
    log2c = np.zeros(n)
    values = np.zeros(n)
    iters = np.zeros(n, dtype=np.int64)
    converged = np.zeros(n, dtype=bool)
    saturated = np.zeros(n, dtype=bool)
    basis[:, 0, :] = v0
    active = np.arange(n)
    for k in range(kmax):
        if active.size == 0:
            break
        V = basis[active, k, :].T
        W, log2s = op.apply(z[active], V)
        if k == 0:
            # fix each shift's scale so that its first product has unit-order size
            with np.errstate(divide="ignore"):
                top = np.floor(np.log2(np.abs(W).max(axis=0)))
            log2c[active] = np.where(np.isfinite(log2s) & np.isfinite(top), log2s - top, 0.0)
        # W holds s K v; bring every column to the fixed scale c K v
        with np.errstate(over="ignore", invalid="ignore"):
            ratio = np.exp2(log2c[active] - log2s)
            W = W * ratio
        bad = ~np.isfinite(log2s) | ~np.all(np.isfinite(W), axis=0)
        Wt = W.T
        a = np.real(np.einsum("ij,ij->i", V.T.conj(), Wt))
        Wt = Wt - a[:, None] * V.T
        if k:
            Wt = Wt - beta[active, k - 1][:, None] * basis[active, k - 1, :]
        Qk = basis[active, : k + 1, :]
        for _ in range(2):
            coef = np.einsum("nkm,nm->nk", Qk.conj(), Wt)
            Wt = Wt - np.einsum("nkm,nk->nm", Qk, coef)
        b = np.linalg.norm(Wt, axis=1)
        alpha[active, k] = a
        beta[active, k] = b
        new_theta = _largest_ritz(alpha[active], beta[active], k + 1)
        iters[active] = k + 1
        change = np.abs(new_theta - theta[active])
        done = (k + 1 == m) | (b <= 8 * np.finfo(float).eps * np.abs(new_theta))
        if k:
            done |= change <= tol * np.abs(new_theta)
        theta[active] = new_theta
        if hist is not None:
            with np.errstate(over="ignore"):
                hist[active, k] = np.sqrt(np.maximum(new_theta, 0.0)) * np.exp2(-0.5 * log2c[active])
        saturated[active[bad]] = True
        done |= bad
        converged[active[done]] = True
        keep = ~done
        if k + 1 < kmax:
            basis[active[keep], k + 1, :] = Wt[keep] / b[keep, None]
        active = active[keep]
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        values = np.sqrt(np.maximum(theta, 0.0)) * np.exp2(-0.5 * log2c)
    values = np.where(saturated | ~np.isfinite(values) | (values > cap), cap, values)
    if hist is not None:
        np.minimum(hist, cap, out=hist)
        hist[saturated] = np.where(np.isnan(hist[saturated]), np.nan, cap)
    return values, iters, converged


def spectral_cloud(T, shifts, tol: float = DEFAULT_TOL, maxit: int = DEFAULT_MAXIT,
                   cfg: SafeConfig = DEFAULT_CONFIG, nb: int = DEFAULT_BLOCK_SIZE, *,
                   seed: int = 0, batch_max: int = BATCH_MAX,
                   history: bool = False) -> CloudResult:
    """Resolvent norm estimates of upper triangular ``T`` at arbitrary shifts.

    A shift leaves the batch once its Ritz value changes by less than
    ``tol`` (relative) between iterations, or when the Krylov space becomes
    invariant. Shifts still running after ``maxit`` iterations keep their
    best estimate and are flagged unconverged. Values are capped at
    :func:`resolvent_cap`; shifts equal to a diagonal entry of ``T`` get
    the cap directly, with zero iterations. With ``history`` the per-iteration estimates
    are kept as an ``(n, maxit)`` array, NaN past each shift's last step.
    """
    nb = check_block_size(nb)
    if maxit < 1 or batch_max < 1:
        raise ValueError("maxit and batch_max must be positive")
    T = as_square(T)
    z = np.atleast_1d(np.asarray(shifts, dtype=np.complex128)).ravel()
    if not np.all(np.isfinite(z)):
        raise ValueError("shifts must be finite")
    n = z.shape[0]
    m = T.shape[0]
    values = np.zeros(n)
    iters = np.zeros(n, dtype=np.int64)
    converged = np.ones(n, dtype=bool)
    hist = np.full((n, maxit), np.nan) if history else None
    if m == 0 or n == 0:
        return CloudResult(values, iters, converged, hist)
    op = _Operator(T, cfg, nb)
    cap = resolvent_cap(T)
    v0 = _start_vector(m, seed)
    # a shift equal to a diagonal entry makes T - zI exactly singular
    singular = np.isin(z, np.diagonal(T))
    values[singular] = cap
    todo = np.flatnonzero(~singular)
    for lo in range(0, todo.size, batch_max):
        idx = todo[lo:lo + batch_max]
        h = None if hist is None else np.full((idx.size, maxit), np.nan)
        values[idx], iters[idx], converged[idx] = _cloud_batch(op, z[idx], tol, maxit, v0, cap, h)
        if h is not None:
            hist[idx] = h
    return CloudResult(values, iters, converged, hist)


def spectral_window(T, grid: GridSpec, tol: float = DEFAULT_TOL, maxit: int = DEFAULT_MAXIT,
                    cfg: SafeConfig = DEFAULT_CONFIG, nb: int = DEFAULT_BLOCK_SIZE, *,
                    seed: int = 0, batch_max: int = BATCH_MAX) -> ResolventField:
    """Resolvent norms of upper triangular ``T`` on every point of ``grid``."""
    pts = grid.points()
    res = spectral_cloud(T, pts.ravel(), tol, maxit, cfg, nb, seed=seed, batch_max=batch_max)
    shape = pts.shape
    return ResolventField(grid, res.values.reshape(shape), res.iterations.reshape(shape),
                          res.converged.reshape(shape))


def portrait_window(T, nx: int, ny: int) -> GridSpec:
    """Bounding box of the eigenvalues, padded by a quarter of its size on each side."""
    T = as_square(T)
    d = np.diagonal(T)
    re_lo, re_hi = float(d.real.min()), float(d.real.max())
    im_lo, im_hi = float(d.imag.min()), float(d.imag.max())
    w, h = re_hi - re_lo, im_hi - im_lo
    pad = 0.25 * max(w, h, 1e-2 * upper_inf_norm(T))
    if pad == 0:
        pad = 1.0
    return GridSpec(complex(0.5 * (re_lo + re_hi), 0.5 * (im_lo + im_hi)),
                    w + 2 * pad, h + 2 * pad, int(nx), int(ny))


def triangular_form(A) -> np.ndarray:
    """``A`` itself when upper triangular, else the triangular factor of its Schur form."""
    A = as_square(A)
    return A if is_upper_triangular(A) else schur(A).t


def spectral_portrait(A, nx: int = 100, ny: int | None = None, tol: float = DEFAULT_TOL,
                      maxit: int = DEFAULT_MAXIT, cfg: SafeConfig = DEFAULT_CONFIG,
                      nb: int = DEFAULT_BLOCK_SIZE, *, grid: GridSpec | None = None,
                      seed: int = 0, batch_max: int = BATCH_MAX) -> ResolventField:
    """Resolvent norms of a general matrix over an automatically sized window.

    Non-triangular input is Schur factorized first; the 2-norm of the
    resolvent is unitarily invariant. An explicit ``grid`` overrides the
    automatic window.
    """
    T = triangular_form(A)
    if grid is None:
        grid = portrait_window(T, nx, nx if ny is None else ny)
    return spectral_window(T, grid, tol, maxit, cfg, nb, seed=seed, batch_max=batch_max)
