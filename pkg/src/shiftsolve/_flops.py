"""Opt-in flop accounting.

Kernels report analytic real-flop counts per call (a complex multiply-add
counts as 8, a complex division as 6). Nothing is recorded unless a
:func:`count_flops` context is active in the current thread/context.
"""

from __future__ import annotations

from collections import Counter
from contextlib import contextmanager
from contextvars import ContextVar
from typing import Iterator

MAC = 8
DIV = 6

_active: ContextVar[tuple["FlopCounter", ...]] = ContextVar("_active", default=())


class FlopCounter:
    """Accumulates flops by category (``"gemm"``, ``"trsv"``, ``"scale"``, ...)."""

    def __init__(self) -> None:
        self.counts: Counter[str] = Counter()

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    @property
    def gemm(self) -> int:
        return self.counts["gemm"]

    def level3_fraction(self) -> float:
        total = self.total
        return self.gemm / total if total else 0.0

    def __repr__(self) -> str:
        return f"FlopCounter({dict(self.counts)})"


@contextmanager
def count_flops() -> Iterator[FlopCounter]:
    """Record flops of every kernel called inside the ``with`` block."""
    counter = FlopCounter()
    token = _active.set(_active.get() + (counter,))
    try:
        yield counter
    finally:
        _active.reset(token)


def record(kind: str, flops: int) -> None:
    for counter in _active.get():
        counter.counts[kind] += int(flops)


def recording() -> bool:
    return bool(_active.get())


def trsv_flops(r) -> int:
    """Flops of one back substitution of order ``r`` (scalar or array, summed)."""
    import numpy as np

    r = np.asarray(r, dtype=np.int64)
    return int(np.sum(MAC * r * (r - 1) // 2 + DIV * r))
