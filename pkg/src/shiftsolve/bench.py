"""Timing harness: blocked solvers against their column-at-a-time baselines."""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass

import numpy as np

from . import _flops, _kernels
from .dense import DEFAULT_BLOCK_SIZE, offdiag_column_norms, trsm_blocked, trsv_unblocked
from .eigen import triang_eig
from .generators import ball_shifts, triangular_spd_spectrum
from .multishift import multishift_trsm
from .safe import DEFAULT_CONFIG, safe_multishift_trsm, safe_trsv

OPS = ("trsm", "multishift-trsm", "safe-multishift-trsm", "triang-eig")
COLUMNS = ("op", "m", "n", "nb", "time_s", "gflops", "baseline_s", "speedup")


class EquivalenceError(AssertionError):
    """Blocked and baseline paths disagree; timings would be meaningless."""


@dataclass(frozen=True)
class BenchReport:
    op: str
    m: int
    n: int
    nb: int
    time: float
    gflops: float
    baseline_time: float

    @property
    def speedup(self) -> float:
        return self.baseline_time / self.time

    def tsv(self) -> str:
        return "\t".join([self.op, str(self.m), str(self.n), str(self.nb),
                          f"{self.time:.6f}", f"{self.gflops:.3f}",
                          f"{self.baseline_time:.6f}", f"{self.speedup:.3f}"])


def median_time(fn, repeats: int = 5) -> float:
    """Median wall time of ``repeats`` calls after one warm-up call."""
    fn()
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def _shifted_solves(U, shifts, B, solve):
    """Baseline: one explicitly shifted copy of ``U``, diagonal refilled per shift."""
    W = np.array(U, dtype=np.complex128, order="F")
    d = np.diagonal(U).copy()
    idx = np.diag_indices(U.shape[0])
    X = np.empty(B.shape, dtype=np.complex128, order="F")
    s = np.ones(B.shape[1])
    for j in range(B.shape[1]):
        W[idx] = d - shifts[j]
        X[:, j], s[j] = solve(W, B[:, j])
    return X, s


def baseline_multishift(U, shifts, B):
    """Shift-by-shift unprotected back substitution."""
    return _shifted_solves(U, shifts, B, lambda W, b: (trsv_unblocked(W, b), 1.0))[0]


def baseline_safe_multishift(U, shifts, B, cfg=DEFAULT_CONFIG):
    """Shift-by-shift safeguarded back substitution."""
    norms = offdiag_column_norms(U)
    return _shifted_solves(U, shifts, B, lambda W, b: safe_trsv(W, b, norms, cfg))


def baseline_trsm(U, B):
    X = np.empty(B.shape, dtype=np.complex128, order="F")
    for j in range(B.shape[1]):
        X[:, j] = trsv_unblocked(U, B[:, j])
    return X


def baseline_triang_eig(T, cfg=DEFAULT_CONFIG):
    """Eigenvector ``k`` from its own safe solve on the leading ``k`` by ``k`` block."""
    m = T.shape[0]
    W = np.array(T, dtype=np.complex128, order="F")
    d = np.diagonal(T).copy()
    idx = np.diag_indices(m)
    norms = offdiag_column_norms(T)
    Z = np.zeros((m, m), dtype=np.complex128, order="F")
    log2_omega = cfg.log2_omega
    delta = cfg.delta(float(np.abs(np.triu(T)).sum(axis=1).max())) if m else cfg.eps
    for k in range(m):
        W[idx] = d - d[k]
        Z[:k, k] = -T[:k, k]
        Z[k, k] = _kernels.safe_trsv_core(W, k, norms, delta, Z, k, 0, log2_omega) if k else 1.0
    return Z


def _close(X, Y, tol=1e-10):
    scale = max(np.abs(Y).max(), 1e-300)
    return np.abs(X - Y).max() <= tol * scale


def _problem(m, n, seed):
    U = triangular_spd_spectrum(m, seed)
    rng = np.random.default_rng(seed + 1)
    B = np.asfortranarray(rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n)))
    return U, ball_shifts(n, seed + 2), B


def run(op: str, m: int, n: int | None = None, nb: int = DEFAULT_BLOCK_SIZE, *,
        repeats: int = 5, seed: int = 0) -> BenchReport:
    """Time ``op`` and its baseline on the well-conditioned test problem.

    The two paths are checked for agreement before any timing starts.
    """
    if op not in OPS:
        raise ValueError(f"unknown op {op!r}; expected one of {', '.join(OPS)}")
    n = m if n is None or op == "triang-eig" else n
    U, shifts, B = _problem(m, n, seed)
    if op == "trsm":
        fast = lambda: trsm_blocked(U, B, nb)
        slow = lambda: baseline_trsm(U, B)
        ok = _close(fast(), slow())
    elif op == "multishift-trsm":
        fast = lambda: multishift_trsm(U, shifts, B, nb)
        slow = lambda: baseline_multishift(U, shifts, B)
        ok = _close(fast(), slow())
    elif op == "safe-multishift-trsm":
        fast = lambda: safe_multishift_trsm(U, shifts, B, nb=nb)
        slow = lambda: baseline_safe_multishift(U, shifts, B)
        (X, s), (Y, t) = fast(), slow()
        ok = _close(X * t, Y * s)
    else:
        fast = lambda: triang_eig(U, nb=nb)
        slow = lambda: baseline_triang_eig(U)
        ok = _close(fast().vectors, slow())
    if not ok:
        raise EquivalenceError(f"{op}: blocked and baseline results differ")
    with _flops.count_flops() as fc:
        fast()
    t_fast = median_time(fast, repeats)
    t_slow = median_time(slow, repeats)
    return BenchReport(op, m, n, nb, t_fast, fc.total / t_fast * 1e-9, t_slow)
