"""Deterministic test matrices and shift sets."""

from __future__ import annotations

import re

import numpy as np

KINDS = ("triangular-spd-spectrum", "uniform-ball", "grcar", "jordan", "diagonal")


class UnknownKindError(ValueError):
    """Generator kind not recognized."""


def _rng(seed):
    return np.random.default_rng(seed)


def uniform_ball(rng, shape, center: complex = 0.0, radius: float = 1.0) -> np.ndarray:
    """Complex samples uniform in the disc ``|z - center| <= radius``."""
    r = radius * np.sqrt(rng.random(shape))
    return center + r * np.exp(2j * np.pi * rng.random(shape))


def random_unitary(m: int, rng) -> np.ndarray:
    """Haar-distributed unitary matrix (QR of a complex Gaussian, phases fixed)."""
    Z = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    Q, R = np.linalg.qr(Z)
    d = np.diagonal(R)
    ph = np.where(d == 0, 1.0, d / np.abs(np.where(d == 0, 1.0, d)))
    return Q * ph


def triangular_spd_spectrum(m: int, seed=None) -> np.ndarray:
    """Upper triangle of a random Hermitian matrix with eigenvalues uniform in [1, 2].

    Well conditioned in practice: its diagonal is a convex combination of
    the eigenvalues and therefore stays in [1, 2].
    """
    rng = _rng(seed)
    ev = 1.0 + rng.random(m)
    Q = random_unitary(m, rng)
    H = (Q * ev) @ Q.conj().T
    H = 0.5 * (H + H.conj().T)
    return np.asfortranarray(np.triu(H))


def uniform_ball_matrix(m: int, seed=None) -> np.ndarray:
    """Dense matrix with entries uniform in the complex unit disc."""
    return np.asfortranarray(uniform_ball(_rng(seed), (m, m)))


def grcar(m: int, k: int = 3) -> np.ndarray:
    """Grcar matrix: -1 on the subdiagonal, 1 on the diagonal and ``k`` superdiagonals."""
    A = np.zeros((m, m), dtype=np.complex128, order="F")
    idx = np.arange(m)
    A[idx, idx] = 1
    A[idx[1:], idx[:-1]] = -1
    for d in range(1, k + 1):
        A[idx[:-d], idx[d:]] = 1
    return A


def jordan(m: int, lam: complex = 0.0) -> np.ndarray:
    """Single Jordan block: ``lam`` on the diagonal, ones above it."""
    A = np.zeros((m, m), dtype=np.complex128, order="F")
    idx = np.arange(m)
    A[idx, idx] = lam
    A[idx[:-1], idx[1:]] = 1
    return A


def diagonal(values) -> np.ndarray:
    return np.asfortranarray(np.diag(np.asarray(values, dtype=np.complex128)))


def ball_shifts(n: int, seed=None, center: complex = 1.5, radius: float = 0.5) -> np.ndarray:
    """``n`` shifts uniform in the disc ``B(center, radius)``."""
    return uniform_ball(_rng(seed), n, center, radius)


def _parse_arg(kind):
    m = re.fullmatch(r"\s*([a-z-]+)\s*(?:\((.*)\))?\s*", kind)
    if not m:
        raise UnknownKindError(f"unknown matrix kind {kind!r}")
    return m.group(1), m.group(2)


def generate(kind: str, m: int | None = None, seed=None) -> np.ndarray:
    """Test matrix by name.

    ``kind`` is one of ``triangular-spd-spectrum``, ``uniform-ball``,
    ``grcar``, ``jordan(lam)`` (``jordan`` alone means ``lam = 0``) or
    ``diagonal(v1,v2,...)``; the diagonal kind takes its size from the list.
    """
    name, arg = _parse_arg(kind)
    if name == "diagonal":
        if not arg:
            raise UnknownKindError("diagonal needs a value list, e.g. diagonal(1,2,3)")
        vals = [complex(v.replace(" ", "").replace("i", "j")) for v in arg.split(",")]
        if m is not None and m != len(vals):
            raise ValueError(f"diagonal list has {len(vals)} entries, m={m}")
        return diagonal(vals)
    if name not in KINDS:
        raise UnknownKindError(f"unknown matrix kind {kind!r}; expected one of {', '.join(KINDS)}")
    if m is None or m < 0:
        raise ValueError(f"{name} needs a size m >= 0")
    if name == "jordan":
        lam = complex(arg.replace(" ", "").replace("i", "j")) if arg else 0.0
        return jordan(m, lam)
    if arg:
        raise UnknownKindError(f"{name} takes no parameter")
    if name == "grcar":
        return grcar(m)
    if name == "uniform-ball":
        return uniform_ball_matrix(m, seed)
    return triangular_spd_spectrum(m, seed)
