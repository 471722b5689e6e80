"""Dense operator matrices: SVD, polar factors, frame completion, sampling, I/O.

An operator ``T`` maps ``C^cols`` (domain) into ``C^rows`` (codomain), so the
array has shape ``(rows, cols)``.  Inner products are linear in the first slot,
``<x, y> = sum(x_i * conj(y_i))``.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Union

import numpy as np

from .errors import (
    DegenerateDraw,
    NoIsometryExists,
    NonFiniteEntry,
    ParseError,
)

EPS = np.finfo(np.float64).eps

# column-orthonormality tolerance used across the package
TAU_ORTH = 1e-10
# reconstruction residual tolerance, scaled by sigma_1 * max(rows, cols)
TAU_RECON = 1e-13


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Immutable dense matrix standing for a linear map ``C^cols -> C^rows``."""

    entries: np.ndarray

    def __post_init__(self):
        a = np.array(self.entries, copy=True)
        if a.ndim != 2:
            raise ValueError(f"expected a 2-d array, got shape {a.shape}")
        if a.shape[0] < 1 or a.shape[1] < 1:
            raise ValueError(f"empty matrix shape {a.shape}")
        if np.iscomplexobj(a):
            a = a.astype(np.complex128)
        else:
            a = a.astype(np.float64)
        if not np.all(np.isfinite(a)):
            raise NonFiniteEntry("matrix contains NaN or Inf entries")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    @property
    def field(self) -> str:
        return "C" if np.iscomplexobj(self.entries) else "R"

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.entries
        return self.entries.astype(dtype)

    def __eq__(self, other):
        if not isinstance(other, OperatorMatrix):
            return NotImplemented
        return self.field == other.field and np.array_equal(self.entries, other.entries)

    def __repr__(self):
        return f"OperatorMatrix({self.rows}x{self.cols}, field={self.field})"


MatrixLike = Union[OperatorMatrix, np.ndarray, Iterable]


def as_operator(T: MatrixLike) -> OperatorMatrix:
    if isinstance(T, OperatorMatrix):
        return T
    return OperatorMatrix(np.asarray(T))


def _array(T: MatrixLike) -> np.ndarray:
    return as_operator(T).entries


@dataclass(frozen=True, eq=False)
class SpectralData:
    """Thin SVD ``T = U diag(s) V*`` with ``k = min(rows, cols)`` columns per frame."""

    singular_values: np.ndarray
    left_frame: np.ndarray
    right_frame: np.ndarray
    shape: tuple[int, int]

    @property
    def norm(self) -> float:
        return float(self.singular_values[0])

    @property
    def min_modulus(self) -> float:
        rows, cols = self.shape
        if cols > rows:
            return 0.0
        return float(self.singular_values[-1])

    def rank(self, rank_tol: float | None = None) -> int:
        if rank_tol is None:
            rank_tol = default_rank_tol(self.shape)
        s = self.singular_values
        return int(np.count_nonzero(s > rank_tol * s[0]))

    def reconstruct(self) -> np.ndarray:
        return (self.left_frame * self.singular_values) @ self.right_frame.conj().T


@dataclass(frozen=True, eq=False)
class PolarDecomposition:
    """``T = V @ P`` with ``V`` column-orthonormal and ``P`` Hermitian PSD."""

    isometry_factor: np.ndarray
    positive_part: np.ndarray


def default_rank_tol(shape: tuple[int, int]) -> float:
    return max(shape) * EPS


def svd(T: MatrixLike) -> SpectralData:
    a = _array(T)
    u, s, vh = np.linalg.svd(a, full_matrices=False)
    for frame in (u, vh):
        frame.setflags(write=False)
    s.setflags(write=False)
    return SpectralData(s, u, vh.conj().T, a.shape)


def singular_values(T: MatrixLike) -> np.ndarray:
    return np.linalg.svd(_array(T), compute_uv=False)


def operator_norm(T: MatrixLike) -> float:
    """Spectral norm, the largest singular value."""
    return float(singular_values(T)[0])


def min_modulus(T: MatrixLike) -> float:
    """Largest ``m`` with ``|Tx| >= m|x|``; zero whenever ``cols > rows``."""
    a = _array(T)
    if a.shape[1] > a.shape[0]:
        return 0.0
    return float(singular_values(a)[-1])


def kernel_dims(T: MatrixLike, rank_tol: float | None = None) -> tuple[int, int]:
    """Return ``(dim ker T, dim ker T*)`` from the numerical rank."""
    a = _array(T)
    rows, cols = a.shape
    if rank_tol is None:
        rank_tol = default_rank_tol(a.shape)
    if rank_tol <= 0:
        raise ValueError("rank_tol must be positive")
    s = singular_values(a)
    r = int(np.count_nonzero(s > rank_tol * s[0])) if s[0] > 0 else 0
    return cols - r, rows - r


def kernel_basis(T: MatrixLike, rank_tol: float | None = None) -> np.ndarray:
    """Orthonormal basis of the numerical kernel, one column per vector."""
    a = _array(T)
    rows, cols = a.shape
    if rank_tol is None:
        rank_tol = default_rank_tol(a.shape)
    _, s, vh = np.linalg.svd(a, full_matrices=True)
    r = int(np.count_nonzero(s > rank_tol * s[0])) if s[0] > 0 else 0
    return vh[r:].conj().T


def complete_orthonormal(Q: np.ndarray, n_total: int) -> np.ndarray:
    """Extend the orthonormal columns of ``Q`` to ``n_total`` orthonormal columns.

    Canonical basis vectors are orthogonalized against the current frame in
    index order (two Gram-Schmidt passes) and accepted when a clear residual
    remains, so the completion is deterministic.
    """
    n = Q.shape[0]
    if n_total > n:
        raise ValueError(f"cannot fit {n_total} orthonormal columns in dimension {n}")
    dtype = np.result_type(Q.dtype, np.float64)
    cols = [Q[:, j].astype(dtype) for j in range(Q.shape[1])]
    for i in range(n):
        if len(cols) >= n_total:
            break
        v = np.zeros(n, dtype=dtype)
        v[i] = 1.0
        for _ in range(2):
            for q in cols:
                v = v - np.vdot(q, v) * q
        nv = np.linalg.norm(v)
        # some canonical vector always keeps residual^2 >= (n - k) / n
        if nv > 1e-3:
            cols.append(v / nv)
    return np.column_stack(cols) if cols else np.zeros((n, 0), dtype=dtype)


def polar(T: MatrixLike, rank_tol: float | None = None) -> PolarDecomposition:
    """Polar decomposition ``T = V |T|`` with ``V`` an isometry.

    When ``T`` is rank deficient the left singular frame is completed on the
    orthocomplement of the range, see :func:`complete_orthonormal`.
    """
    a = _array(T)
    rows, cols = a.shape
    if cols > rows:
        raise NoIsometryExists(
            f"no {rows}x{cols} isometry exists: domain dimension exceeds codomain"
        )
    if rank_tol is None:
        rank_tol = default_rank_tol(a.shape)
    u, s, vh = np.linalg.svd(a, full_matrices=False)
    r = int(np.count_nonzero(s > rank_tol * s[0])) if s[0] > 0 else 0
    left = u if r == cols else complete_orthonormal(u[:, :r], cols)
    V = left @ vh
    P = (vh.conj().T * s) @ vh
    P = (P + P.conj().T) / 2
    if not np.iscomplexobj(a):
        V, P = V.real, P.real
    return PolarDecomposition(V, P)


def field_dtype(field: str):
    if field == "R":
        return np.float64
    if field == "C":
        return np.complex128
    raise ValueError(f"unknown field {field!r}, expected 'R' or 'C'")


def _gaussian(shape, field: str, rng: np.random.Generator) -> np.ndarray:
    if field_dtype(field) is np.float64:
        return rng.standard_normal(shape)
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


_MAX_RETRIES = 16
_MIN_DRAW_NORM = 1e-12


def random_unit_vector(dim: int, field: str, rng: np.random.Generator) -> np.ndarray:
    for _ in range(_MAX_RETRIES):
        v = _gaussian(dim, field, rng)
        nv = np.linalg.norm(v)
        if nv > _MIN_DRAW_NORM:
            return v / nv
    raise DegenerateDraw(f"{_MAX_RETRIES} consecutive near-zero Gaussian draws")


def random_orthogonal_pair(
    dim: int, field: str, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    if dim < 2:
        raise ValueError("orthogonal pairs need dim >= 2")
    x = random_unit_vector(dim, field, rng)
    for _ in range(_MAX_RETRIES):
        y = _gaussian(dim, field, rng)
        y = y - np.vdot(x, y) * x
        y = y - np.vdot(x, y) * x
        ny = np.linalg.norm(y)
        if ny > _MIN_DRAW_NORM:
            return x, y / ny
    raise DegenerateDraw("could not draw a vector off the span of x")


def random_orthogonal_pairs(
    n: int, dim: int, field: str, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Batched :func:`random_orthogonal_pair`; rows of the two arrays pair up."""
    if dim < 2:
        raise ValueError("orthogonal pairs need dim >= 2")
    X = _gaussian((n, dim), field, rng)
    Y = _gaussian((n, dim), field, rng)
    for _ in range(_MAX_RETRIES):
        nx = np.linalg.norm(X, axis=1)
        X /= np.where(nx > _MIN_DRAW_NORM, nx, 1.0)[:, None]
        for _ in range(2):
            Y -= np.sum(X.conj() * Y, axis=1)[:, None] * X
        ny = np.linalg.norm(Y, axis=1)
        bad = (nx <= _MIN_DRAW_NORM) | (ny <= _MIN_DRAW_NORM)
        if not bad.any():
            return X, Y / ny[:, None]
        k = int(bad.sum())
        X[bad] = _gaussian((k, dim), field, rng)
        Y[bad] = _gaussian((k, dim), field, rng)
    raise DegenerateDraw("batched pair draw kept degenerating")


def random_isometry(rows: int, cols: int, field: str, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed column-orthonormal matrix via QR of a Gaussian matrix."""
    if cols > rows:
        raise NoIsometryExists(f"no {rows}x{cols} isometry exists")
    q, r = np.linalg.qr(_gaussian((rows, cols), field, rng))
    d = np.diag(r)
    return q * (d / np.abs(d))


# --- plain-text matrix format ------------------------------------------------

def _parse_real(tok: str, line: int) -> float:
    try:
        return float(tok)
    except ValueError:
        raise ParseError(f"bad real entry {tok!r}", line) from None


def _parse_complex(tok: str, line: int) -> complex:
    if not tok.endswith("i"):
        return complex(_parse_real(tok, line))
    body = tok[:-1]
    # split at the last sign that is not part of an exponent
    k = len(body)
    for j in range(len(body) - 1, -1, -1):
        if body[j] in "+-" and (j == 0 or body[j - 1] not in "eE"):
            k = j
            break
    else:
        k = 0
    real_tok, imag_tok = body[:k], body[k:]
    if imag_tok in ("", "+", "-"):
        imag_tok += "1"
    re_part = _parse_real(real_tok, line) if real_tok else 0.0
    im_part = _parse_real(imag_tok, line)
    return complex(re_part, im_part)


def parse_matrix(text: str) -> OperatorMatrix:
    """Parse the ``rows cols field`` text format; errors carry 1-based line numbers."""
    lines = text.splitlines()
    numbered = [(i + 1, ln.split()) for i, ln in enumerate(lines) if ln.strip()]
    if not numbered:
        raise ParseError("empty matrix file", 1)
    hline, header = numbered[0]
    if len(header) != 3:
        raise ParseError("header must be 'rows cols field'", hline)
    try:
        rows, cols = int(header[0]), int(header[1])
    except ValueError:
        raise ParseError("rows and cols must be integers", hline) from None
    if rows < 1 or cols < 1:
        raise ParseError("rows and cols must be positive", hline)
    field = header[2]
    if field not in ("R", "C"):
        raise ParseError(f"field must be R or C, got {field!r}", hline)
    body = numbered[1:]
    if len(body) != rows:
        where = body[rows][0] if len(body) > rows else (body[-1][0] + 1 if body else hline + 1)
        raise ParseError(f"expected {rows} data rows, found {len(body)}", where)
    out = np.zeros((rows, cols), dtype=field_dtype(field))
    for r, (lineno, toks) in enumerate(body):
        if len(toks) != cols:
            raise ParseError(f"expected {cols} entries, found {len(toks)}", lineno)
        for c, tok in enumerate(toks):
            if field == "R":
                if tok.endswith("i"):
                    raise ParseError(f"complex entry {tok!r} in a real matrix", lineno)
                v = _parse_real(tok, lineno)
            else:
                v = _parse_complex(tok, lineno)
            if not np.isfinite(v):
                raise ParseError(f"non-finite entry {tok!r}", lineno)
            out[r, c] = v
    return OperatorMatrix(out)


def read_matrix(path: str | Path) -> OperatorMatrix:
    return parse_matrix(Path(path).read_text())


def _fmt_real(v: float) -> str:
    s = repr(float(v) + 0.0)
    return s[:-2] if s.endswith(".0") else s


def _fmt_complex(z: complex) -> str:
    re_s = _fmt_real(z.real)
    im = float(z.imag) + 0.0
    im_s = _fmt_real(abs(im))
    sign = "-" if np.signbit(im) else "+"
    return f"{re_s}{sign}{im_s}i"


def format_matrix(T: MatrixLike) -> str:
    op = as_operator(T)
    buf = io.StringIO()
    buf.write(f"{op.rows} {op.cols} {op.field}\n")
    fmt = _fmt_real if op.field == "R" else _fmt_complex
    for row in op.entries:
        buf.write(" ".join(fmt(v) for v in row))
        buf.write("\n")
    return buf.getvalue()


def write_matrix(T: MatrixLike, path: str | Path) -> None:
    Path(path).write_text(format_matrix(T))
