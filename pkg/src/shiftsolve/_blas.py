"""Direct ``zgemm`` on strided column-major views.

numpy's ``C -= A @ B`` allocates a temporary for the product and makes
extra passes over ``C``; calling BLAS with ``beta = 1`` updates the
sub-block in place. The routine comes from SciPy's Cython BLAS table.
"""

from __future__ import annotations

import ctypes

import numpy as np
from numba.extending import get_cython_function_address

_P = ctypes.c_void_p
_zgemm = ctypes.CFUNCTYPE(None, *([_P] * 13))(
    get_cython_function_address("scipy.linalg.cython_blas", "zgemm"))
_N = ctypes.c_char_p(b"N")
_ITEM = np.dtype(np.complex128).itemsize


def _ld(a: np.ndarray) -> int | None:
    """Leading dimension of a column-major view, or None if BLAS cannot take it."""
    if a.dtype != np.complex128 or a.strides[0] != _ITEM:
        return None
    if a.shape[1] <= 1:
        return max(a.shape[0], 1)
    ld, rem = divmod(a.strides[1], _ITEM)
    if rem or ld < max(a.shape[0], 1):
        return None
    return ld


def zgemm_inplace(C: np.ndarray, A: np.ndarray, B: np.ndarray,
                  alpha: complex, beta: complex) -> bool:
    """``C := alpha A B + beta C`` in place; returns False if layouts do not allow it."""
    if not C.flags.writeable:
        return False
    ldc, lda, ldb = _ld(C), _ld(A), _ld(B)
    if ldc is None or lda is None or ldb is None:
        return False
    m, n = C.shape
    k = A.shape[1]
    scal = np.array([alpha, beta], dtype=np.complex128)
    c_int = ctypes.c_int
    _zgemm(_N, _N, ctypes.byref(c_int(m)), ctypes.byref(c_int(n)), ctypes.byref(c_int(k)),
           _P(scal.ctypes.data), _P(A.ctypes.data), ctypes.byref(c_int(lda)),
           _P(B.ctypes.data), ctypes.byref(c_int(ldb)),
           _P(scal.ctypes.data + _ITEM), _P(C.ctypes.data), ctypes.byref(c_int(ldc)))
    return True
