"""Matrix Market reading and writing for dense complex matrices.

Writes ``array complex general`` with 17 significant digits, so a round
trip reproduces every value exactly. Reads array and coordinate files of
any numeric field; real and integer data are promoted to complex.
"""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass, field

import numpy as np

HEADER = "%%MatrixMarket matrix array complex general"
_FIELDS = ("real", "complex", "integer", "pattern")
_SYMMETRIES = ("general", "symmetric", "hermitian", "skew-symmetric")


class MatrixMarketError(ValueError):
    """Malformed Matrix Market input; ``line`` is 1-based (0 when unknown)."""

    def __init__(self, message: str, line: int = 0, path=None):
        self.line = line
        self.path = path
        where = f"{path}:" if path is not None else ""
        where += f"{line}: " if line else (": " if where else "")
        super().__init__(f"{where}{message}")


@dataclass(frozen=True)
class MatrixFile:
    """A parsed file: the matrix plus its comment lines (without the leading ``%``)."""

    matrix: np.ndarray
    format: str
    field: str
    symmetry: str
    comments: list[str] = field(default_factory=list)

    def annotations(self, tag: str) -> list[list[str]]:
        """Token lists of comment lines starting with ``tag``, e.g. ``"s"``."""
        out = []
        for c in self.comments:
            tok = c.split()
            if tok and tok[0] == tag:
                out.append(tok[1:])
        return out


def _fmt(x: float) -> str:
    return "%.17g" % x


def _parse_number(tok, lineno, path):
    try:
        return float(tok)
    except ValueError:
        raise MatrixMarketError(f"invalid number {tok!r}", lineno, path) from None


def _parse_int(tok, lineno, path, what):
    try:
        v = int(tok)
    except ValueError:
        raise MatrixMarketError(f"invalid {what} {tok!r}", lineno, path) from None
    if v < 0:
        raise MatrixMarketError(f"negative {what} {v}", lineno, path)
    return v


def parse(text: str, path=None) -> MatrixFile:
    """Parse Matrix Market text."""
    lines = text.splitlines()
    if not lines or not lines[0].lower().startswith("%%matrixmarket"):
        raise MatrixMarketError("missing %%MatrixMarket header", 1, path)
    head = lines[0].split()
    if len(head) != 5 or head[1].lower() != "matrix":
        raise MatrixMarketError(f"malformed header {lines[0]!r}", 1, path)
    fmt, fld, sym = (h.lower() for h in head[2:])
    if fmt not in ("array", "coordinate"):
        raise MatrixMarketError(f"unsupported format {fmt!r}", 1, path)
    if fld not in _FIELDS or (fmt == "array" and fld == "pattern"):
        raise MatrixMarketError(f"unsupported field {fld!r}", 1, path)
    if sym not in _SYMMETRIES:
        raise MatrixMarketError(f"unsupported symmetry {sym!r}", 1, path)
    if sym == "hermitian" and fld != "complex":
        raise MatrixMarketError("hermitian symmetry requires complex field", 1, path)

    comments = []
    data = []
    for lineno, line in enumerate(lines[1:], start=2):
        s = line.strip()
        if s.startswith("%"):
            comments.append(s[1:])
        elif s:
            data.append((lineno, s.split()))
    if not data:
        raise MatrixMarketError("missing size line", len(lines), path)

    lineno, size = data[0]
    want = 2 if fmt == "array" else 3
    if len(size) != want:
        raise MatrixMarketError(f"size line needs {want} integers, got {len(size)}", lineno, path)
    m = _parse_int(size[0], lineno, path, "row count")
    n = _parse_int(size[1], lineno, path, "column count")
    if sym != "general" and m != n:
        raise MatrixMarketError(f"{sym} matrix must be square, got {m}x{n}", lineno, path)
    per = {"complex": 2, "pattern": 0}.get(fld, 1)
    body = data[1:]
    A = np.zeros((m, n), dtype=np.complex128, order="F")

    def value(tokens, lineno):
        if per == 0:
            return 1.0
        re = _parse_number(tokens[0], lineno, path)
        im = _parse_number(tokens[1], lineno, path) if per == 2 else 0.0
        return complex(re, im)

    def put(i, j, v):
        A[i, j] = v
        if i != j:
            if sym == "symmetric":
                A[j, i] = v
            elif sym == "skew-symmetric":
                A[j, i] = -v
            elif sym == "hermitian":
                A[j, i] = v.conjugate()

    if fmt == "array":
        if sym == "general":
            slots = [(i, j) for j in range(n) for i in range(m)]
        else:
            lo = 1 if sym == "skew-symmetric" else 0
            slots = [(i, j) for j in range(n) for i in range(j + lo, m)]
        if len(body) != len(slots):
            last = body[-1][0] if body else lineno
            raise MatrixMarketError(f"expected {len(slots)} entries, found {len(body)}",
                                    last, path)
        for (lineno, tok), (i, j) in zip(body, slots):
            if len(tok) != per:
                raise MatrixMarketError(f"expected {per} values per entry, got {len(tok)}",
                                        lineno, path)
            put(i, j, value(tok, lineno))
    else:
        nnz = _parse_int(size[2], lineno, path, "entry count")
        if len(body) != nnz:
            last = body[-1][0] if body else lineno
            raise MatrixMarketError(f"expected {nnz} entries, found {len(body)}", last, path)
        for lineno, tok in body:
            if len(tok) != 2 + per:
                raise MatrixMarketError(f"expected {2 + per} tokens per entry, got {len(tok)}",
                                        lineno, path)
            i = _parse_int(tok[0], lineno, path, "row index") - 1
            j = _parse_int(tok[1], lineno, path, "column index") - 1
            if not (0 <= i < m and 0 <= j < n):
                raise MatrixMarketError(f"index ({i + 1}, {j + 1}) outside {m}x{n}", lineno, path)
            put(i, j, value(tok[2:], lineno))
    return MatrixFile(A, fmt, fld, sym, comments)


def read_matrix_file(path) -> MatrixFile:
    try:
        with open(path, encoding="ascii") as f:
            text = f.read()
    except UnicodeDecodeError as e:
        raise MatrixMarketError(f"not a text file ({e.reason})", 0, path) from None
    return parse(text, path)


def read_matrix(path) -> np.ndarray:
    """Dense complex matrix from a Matrix Market file."""
    return read_matrix_file(path).matrix


def format_matrix(M, comments=()) -> str:
    """Matrix Market text of ``M`` (``array complex general``) with trailing comments."""
    A = np.asarray(M, dtype=np.complex128)
    if A.ndim == 1:
        A = A[:, None]
    if A.ndim != 2:
        raise ValueError(f"expected a matrix, got {A.ndim} dimensions")
    out = [HEADER, f"{A.shape[0]} {A.shape[1]}"]
    out.extend(f"{_fmt(z.real)} {_fmt(z.imag)}" for z in A.ravel(order="F"))
    out.extend("%" + c for c in comments)
    return "\n".join(out) + "\n"


def write_text_atomic(path, data: str | bytes) -> None:
    """Write to a temporary file next to ``path``, then rename over it."""
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, mode) as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_matrix(path, M, comments=()) -> None:
    """Write ``M`` atomically; ``comments`` are appended as ``%`` lines."""
    write_text_atomic(path, format_matrix(M, comments))


def scale_comments(s) -> list[str]:
    """``s j value`` comment lines (``j`` is 1-based)."""
    return [f"s {j + 1} {_fmt(v)}" for j, v in enumerate(np.asarray(s, dtype=float))]


def eigenvalue_comments(lam) -> list[str]:
    """``lambda j re im`` comment lines (``j`` is 1-based)."""
    return [f"lambda {j + 1} {_fmt(z.real)} {_fmt(z.imag)}"
            for j, z in enumerate(np.asarray(lam, dtype=np.complex128))]
