"""Blocked multi-shift triangular solves, safeguarded scaling, triangular
eigenvectors and resolvent-norm (pseudospectra) computation."""

from types import ModuleType as _ModuleType

from ._flops import FlopCounter, count_flops
from .dense import (
    DEFAULT_BLOCK_SIZE,
    ShapeError,
    gemm_update,
    is_upper_triangular,
    offdiag_column_norms,
    trsm_blocked,
    trsv_unblocked,
    upper_inf_norm,
)
from .eigen import (
    EigenDecomposition,
    InfiniteEigenvalueError,
    eig,
    generalized_eig,
    generalized_triang_eig,
    normalize_columns,
    relative_residual,
    triang_eig,
)
from .multishift import generalized_multishift_trsm, multishift_trsm
from .pseudospectra import (
    CloudResult,
    GridSpec,
    ResolventField,
    resolvent_cap,
    resolvent_norm_reference,
    spectral_cloud,
    spectral_portrait,
    spectral_window,
)
from .safe import (
    DEFAULT_CONFIG,
    SafeConfig,
    growth_precheck,
    safe_generalized_multishift_trsm,
    safe_multishift_trsm,
    safe_multishift_trsm_adjoint,
    safe_trsv,
)
from .schur import SchurConvergenceError, SchurPair, hessenberg_reduce, schur, schur_qr
from .svd import singular_values
from . import generators

__all__ = [n for n, v in dict(globals()).items()
           if not n.startswith("_") and not isinstance(v, _ModuleType)]
__version__ = "0.1.0"
