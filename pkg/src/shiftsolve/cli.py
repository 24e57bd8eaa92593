"""Command-line front end.

Exit status: 0 on success, 1 for usage errors, 2 for unreadable or
malformed input, 3 when a numerical method fails.
"""

from __future__ import annotations

import argparse
import io
import sys

import numpy as np

from . import bench, mmio
from .dense import DEFAULT_BLOCK_SIZE, ShapeError, is_upper_triangular, trsm_blocked
from .eigen import InfiniteEigenvalueError, eig, triang_eig
from .generators import UnknownKindError, generate
from .multishift import multishift_trsm
from .pseudospectra import (
    DEFAULT_MAXIT,
    DEFAULT_TOL,
    GridSpec,
    ResolventField,
    spectral_cloud,
    spectral_portrait,
    spectral_window,
    triangular_form,
)
from .safe import safe_multishift_trsm
from .schur import SchurConvergenceError

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_NUMERICAL = 0, 1, 2, 3
CSV_HEADER = "re,im,value,iterations,converged"


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _grid(text: str) -> GridSpec:
    parts = text.split(",")
    if len(parts) != 6:
        raise argparse.ArgumentTypeError("expected cx,cy,w,h,nx,ny")
    try:
        cx, cy, w, h = (float(p) for p in parts[:4])
        nx, ny = int(parts[4]), int(parts[5])
        return GridSpec(complex(cx, cy), w, h, nx, ny)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _resolution(text: str) -> tuple[int, int]:
    try:
        parts = [int(p) for p in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError("expected NX or NX,NY") from None
    if len(parts) not in (1, 2) or min(parts) < 1:
        raise argparse.ArgumentTypeError("expected positive NX or NX,NY")
    return parts[0], parts[-1]


def _int_list(text: str) -> list[int]:
    try:
        vals = [int(p) for p in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma-separated integers") from None
    if min(vals) < 1:
        raise argparse.ArgumentTypeError("sizes must be positive")
    return vals


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="shiftsolve", description="Multi-shift triangular solves, "
                "eigenvectors and pseudospectra.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, *, rhs=False, shifts=False, grid=False, lanczos=False, fmt=False):
        src = sp.add_mutually_exclusive_group(required=True)
        src.add_argument("--matrix", metavar="PATH", help="Matrix Market input")
        src.add_argument("--generate", metavar="KIND",
                         help="built-in test matrix, e.g. grcar or jordan(0)")
        sp.add_argument("--size", type=_positive_int, help="order of a generated matrix")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--block-size", type=_positive_int, default=DEFAULT_BLOCK_SIZE)
        sp.add_argument("--out", metavar="PATH", default="-", help="output file (default stdout)")
        if rhs:
            sp.add_argument("--rhs", metavar="PATH", required=True)
        if shifts:
            sp.add_argument("--shifts", metavar="PATH", required=shifts == "required",
                            help="Matrix Market vector of shifts")
        if grid:
            sp.add_argument("--grid", type=_grid, required=grid == "required",
                            metavar="cx,cy,w,h,nx,ny")
        if lanczos:
            sp.add_argument("--tol", type=float, default=DEFAULT_TOL)
            sp.add_argument("--maxit", type=_positive_int, default=DEFAULT_MAXIT)
        if fmt:
            sp.add_argument("--format", choices=("csv", "pgm"), default="csv")

    common(sub.add_parser("solve", help="(U - shift_j I) x_j = b_j"), rhs=True, shifts=True)
    common(sub.add_parser("safe-solve", help="scaled solve, s_j appended as comments"),
           rhs=True, shifts=True)
    common(sub.add_parser("eig", help="eigenvalues and eigenvectors"))
    common(sub.add_parser("triang-eig", help="eigenvectors of an upper triangular matrix"))
    common(sub.add_parser("cloud", help="resolvent norms at listed shifts"),
           shifts="required", lanczos=True)
    common(sub.add_parser("window", help="resolvent norms on a grid"),
           grid="required", lanczos=True, fmt=True)
    sp = sub.add_parser("portrait", help="resolvent norms on an automatic window")
    common(sp, grid=True, lanczos=True, fmt=True)
    sp.add_argument("--resolution", type=_resolution, default=(100, 100), metavar="NX[,NY]")

    sp = sub.add_parser("bench", help="blocked solvers against column-at-a-time baselines")
    sp.add_argument("--op", choices=bench.OPS, default="multishift-trsm")
    sp.add_argument("--m", type=_int_list, default=[500, 1000, 2000], metavar="M[,M...]")
    sp.add_argument("--n", type=_int_list, metavar="N[,N...]",
                    help="right-hand sides per size (default: equal to m)")
    sp.add_argument("--block-size", type=_positive_int, default=DEFAULT_BLOCK_SIZE)
    sp.add_argument("--repeats", type=_positive_int, default=5)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", metavar="PATH", default="-")
    return p


def _load_matrix(args) -> np.ndarray:
    if args.generate is not None:
        try:
            return generate(args.generate, args.size, args.seed)
        except UnknownKindError as e:
            raise UsageError(str(e)) from None
        except ValueError as e:
            raise UsageError(str(e)) from None
    return _read(args.matrix)


def _read(path) -> np.ndarray:
    try:
        return mmio.read_matrix(path)
    except OSError as e:
        raise InputError(f"{path}: {e.strerror or e}") from None


def _square(A, what="matrix"):
    if A.shape[0] != A.shape[1]:
        raise InputError(f"{what} must be square, got {A.shape[0]}x{A.shape[1]}")
    return A


def _load_shifts(path, n=None) -> np.ndarray:
    lam = _read(path)
    if 1 not in lam.shape and lam.size:
        raise InputError(f"{path}: shifts must be a vector, got {lam.shape[0]}x{lam.shape[1]}")
    lam = lam.ravel()
    if n is not None and lam.size != n:
        raise InputError(f"{path}: {lam.size} shifts for {n} right-hand sides")
    return lam


def _emit(args, data: str | bytes) -> None:
    if args.out == "-":
        if isinstance(data, bytes):
            sys.stdout.flush()
            sys.stdout.buffer.write(data)
            sys.stdout.buffer.flush()
        else:
            sys.stdout.write(data)
    else:
        mmio.write_text_atomic(args.out, data)


def field_csv(points, values, iterations, converged, header: bool = True) -> str:
    """CSV rows ``re,im,value,iterations,converged`` in the order given."""
    buf = io.StringIO()
    if header:
        buf.write(CSV_HEADER + "\n")
    for z, v, k, c in zip(np.ravel(points), np.ravel(values), np.ravel(iterations),
                          np.ravel(converged)):
        buf.write("%.17g,%.17g,%.17g,%d,%d\n" % (z.real, z.imag, v, k, int(c)))
    return buf.getvalue()


def field_pgm(field: ResolventField) -> bytes:
    """Binary PGM of ``log10(value)`` mapped linearly onto 0..255.

    The top image row is the largest imaginary part. A constant field maps to 0.
    """
    L = np.log10(field.values)
    lo, hi = float(L.min()), float(L.max())
    if hi > lo:
        pix = np.rint((L - lo) / (hi - lo) * 255.0)
    else:
        pix = np.zeros_like(L)
    img = pix.astype(np.uint8)[::-1]
    ny, nx = img.shape
    return f"P5\n{nx} {ny}\n255\n".encode("ascii") + img.tobytes()


def _field_output(args, field: ResolventField):
    if args.format == "pgm":
        _emit(args, field_pgm(field))
    else:
        _emit(args, field_csv(field.points(), field.values, field.iterations, field.converged))


def _cmd_solve(args, safe):
    U = _square(_load_matrix(args))
    B = _read(args.rhs)
    if B.shape[0] != U.shape[0]:
        raise InputError(f"rhs has {B.shape[0]} rows, matrix has order {U.shape[0]}")
    if not is_upper_triangular(U):
        print("warning: matrix is not upper triangular; the lower triangle is ignored",
              file=sys.stderr)
    n = B.shape[1]
    lam = _load_shifts(args.shifts, n) if args.shifts else np.zeros(n, dtype=np.complex128)
    if safe:
        X, s = safe_multishift_trsm(U, lam, B, nb=args.block_size)
        _emit(args, mmio.format_matrix(X, mmio.scale_comments(s)))
        return
    if args.shifts:
        X = multishift_trsm(U, lam, B, args.block_size)
    else:
        X = trsm_blocked(U, B, args.block_size)
    if not np.all(np.isfinite(X)):
        raise FloatingPointError("solution has non-finite entries (singular shifted matrix); "
                                 "use safe-solve")
    _emit(args, mmio.format_matrix(X))


def _cmd_eig(args, triangular):
    A = _square(_load_matrix(args))
    res = triang_eig(A, nb=args.block_size) if triangular else eig(A, nb=args.block_size)
    comments = mmio.eigenvalue_comments(res.lam)
    if triangular:
        comments += mmio.scale_comments(res.scales)
    _emit(args, mmio.format_matrix(res.vectors, comments))


def _cmd_cloud(args):
    T = triangular_form(_square(_load_matrix(args)))
    lam = _load_shifts(args.shifts)
    res = spectral_cloud(T, lam, args.tol, args.maxit, nb=args.block_size, seed=args.seed)
    _emit(args, field_csv(lam, res.values, res.iterations, res.converged))


def _cmd_window(args):
    T = triangular_form(_square(_load_matrix(args)))
    _field_output(args, spectral_window(T, args.grid, args.tol, args.maxit,
                                        nb=args.block_size, seed=args.seed))


def _cmd_portrait(args):
    A = _square(_load_matrix(args))
    nx, ny = args.resolution
    _field_output(args, spectral_portrait(A, nx, ny, args.tol, args.maxit, nb=args.block_size,
                                          grid=args.grid, seed=args.seed))


def _cmd_bench(args):
    ns = args.n or [None] * len(args.m)
    if len(ns) != len(args.m):
        raise UsageError("--n needs one entry per --m entry")
    lines = ["\t".join(bench.COLUMNS)]
    for m, n in zip(args.m, ns):
        r = bench.run(args.op, m, n, args.block_size, repeats=args.repeats, seed=args.seed)
        lines.append(r.tsv())
        print(lines[-1], file=sys.stderr, flush=True)
    _emit(args, "\n".join(lines) + "\n")


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "solve": lambda: _cmd_solve(args, safe=False),
        "safe-solve": lambda: _cmd_solve(args, safe=True),
        "eig": lambda: _cmd_eig(args, triangular=False),
        "triang-eig": lambda: _cmd_eig(args, triangular=True),
        "cloud": lambda: _cmd_cloud(args),
        "window": lambda: _cmd_window(args),
        "portrait": lambda: _cmd_portrait(args),
        "bench": lambda: _cmd_bench(args),
    }
    try:
        handlers[args.command]()
    except UsageError as e:
        print(f"shiftsolve: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (mmio.MatrixMarketError, InputError, ShapeError) as e:
        print(f"shiftsolve: input error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except (SchurConvergenceError, InfiniteEigenvalueError, FloatingPointError,
            bench.EquivalenceError) as e:
        print(f"shiftsolve: numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as e:
        print(f"shiftsolve: input error: {e}", file=sys.stderr)
        return EXIT_PARSE
    return EXIT_OK


def main(argv=None) -> None:
    sys.exit(run(argv))
