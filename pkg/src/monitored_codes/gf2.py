"""Bit-packed linear algebra over GF(2).

Matrices are stored row-major with each row packed little-endian into
``uint64`` words, so that column ``c`` lives in bit ``c % 64`` of word
``c // 64``.  Row reduction XORs whole word slices at once, which keeps the
elimination cost at O(rows * cols * rank / 64).

All public functions accept either a :class:`BitMatrix` or any 2-D array-like
of 0/1 entries.  Vectors are plain 1-D ``uint8`` numpy arrays.
"""
from __future__ import annotations

import numba
import numpy as np

WORD = 64


class DimensionError(ValueError):
    """Raised when operand shapes violate an operation's contract."""


def _n_words(ncols: int) -> int:
    return max(1, -(-ncols // WORD))


def pack_rows(dense: np.ndarray) -> np.ndarray:
    """Pack a dense (rows, cols) 0/1 array into (rows, words) ``uint64``."""
    dense = np.asarray(dense, dtype=np.uint8) & 1
    if dense.ndim != 2:
        raise DimensionError(f"expected a 2-D array, got shape {dense.shape}")
    rows, cols = dense.shape
    nbytes = _n_words(cols) * 8
    packed = np.zeros((rows, nbytes), dtype=np.uint8)
    if cols:
        b = np.packbits(dense, axis=1, bitorder="little")
        packed[:, : b.shape[1]] = b
    return packed.view("<u8").astype(np.uint64, copy=False)


def unpack_rows(words: np.ndarray, ncols: int) -> np.ndarray:
    """Inverse of :func:`pack_rows`."""
    words = np.ascontiguousarray(words, dtype="<u8")
    if words.shape[0] == 0:
        return np.zeros((0, ncols), dtype=np.uint8)
    as_bytes = words.view(np.uint8).reshape(words.shape[0], -1)
    return np.unpackbits(as_bytes, axis=1, count=ncols, bitorder="little")


class BitMatrix:
    """An immutable GF(2) matrix with bit-packed rows."""

    __slots__ = ("words", "nrows", "ncols")

    def __init__(self, words: np.ndarray, ncols: int):
        words = np.asarray(words, dtype=np.uint64)
        if words.ndim != 2 or words.shape[1] != _n_words(ncols):
            raise DimensionError("packed word array does not match ncols")
        words.setflags(write=False)
        self.words = words
        self.nrows = words.shape[0]
        self.ncols = ncols

    @classmethod
    def from_dense(cls, dense) -> "BitMatrix":
        dense = np.asarray(dense, dtype=np.uint8)
        if dense.ndim == 1:
            dense = dense.reshape(1, -1)
        return cls(pack_rows(dense), dense.shape[1])

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "BitMatrix":
        return cls(np.zeros((nrows, _n_words(ncols)), dtype=np.uint64), ncols)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls.from_dense(np.eye(n, dtype=np.uint8))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def to_dense(self) -> np.ndarray:
        return unpack_rows(self.words, self.ncols)

    def row(self, i: int) -> np.ndarray:
        return unpack_rows(self.words[i : i + 1], self.ncols)[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.words, other.words)

    def __repr__(self) -> str:
        return f"BitMatrix({self.nrows}x{self.ncols})"


def as_bitmatrix(m) -> BitMatrix:
    if isinstance(m, BitMatrix):
        return m
    return BitMatrix.from_dense(m)


@numba.njit(cache=True, nogil=True)
def _eliminate_inplace(a: np.ndarray, limit: int, above: bool) -> np.ndarray:
    nrows, nwords = a.shape
    pivots = np.empty(min(nrows, limit), dtype=np.int64)
    r = 0
    for c in range(limit):
        if r == nrows:
            break
        w = c >> 6
        bit = np.uint64(1) << np.uint64(c & 63)
        p = r
        while p < nrows and not (a[p, w] & bit):
            p += 1
        if p == nrows:
            continue
        if p != r:
            for j in range(w, nwords):
                t = a[r, j]
                a[r, j] = a[p, j]
                a[p, j] = t
        for i in range(0 if above else r + 1, nrows):
            if i != r and (a[i, w] & bit):
                for j in range(w, nwords):
                    a[i, j] ^= a[r, j]
        pivots[r] = c
        r += 1
    return pivots[:r]


def _eliminate(words: np.ndarray, ncols: int, limit: int | None = None, full: bool = True):
    """Gauss-Jordan elimination on packed rows.

    Pivots are chosen on the leftmost remaining nonzero column, taking the
    first available row.  Only columns ``< limit`` may hold pivots.  Returns
    the reduced rows (all of them, pivot rows first) and the pivot columns.
    With ``full=False`` rows above each pivot are left alone (plain echelon
    form), which is enough for rank and for the rows below the pivots.
    The inner loop is compiled and releases the GIL.
    """
    a = np.array(words, dtype=np.uint64, copy=True, order="C")
    limit = ncols if limit is None else limit
    if a.shape[0] == 0:
        return a, []
    return a, _eliminate_inplace(a, limit, full).tolist()


def rref(m) -> tuple[BitMatrix, list[int]]:
    """Reduced row echelon form (nonzero rows only) and pivot columns."""
    m = as_bitmatrix(m)
    a, piv = _eliminate(m.words, m.ncols)
    return BitMatrix(a[: len(piv)], m.ncols), piv


def rank(m) -> int:
    """Dimension of the row space of ``m``."""
    m = as_bitmatrix(m)
    if m.nrows == 0 or m.ncols == 0:
        return 0
    return len(_eliminate(m.words, m.ncols, full=False)[1])


def nullspace_basis(m) -> np.ndarray:
    """Basis of ``{v : m v = 0}`` as the rows of a dense ``uint8`` array.

    The basis has ``ncols - rank(m)`` rows; each row is a kernel vector.
    """
    m = as_bitmatrix(m)
    ncols = m.ncols
    if m.nrows == 0:
        return np.eye(ncols, dtype=np.uint8)
    a, piv = _eliminate(m.words, ncols)
    reduced = unpack_rows(a[: len(piv)], ncols)
    is_pivot = np.zeros(ncols, dtype=bool)
    is_pivot[piv] = True
    free = np.flatnonzero(~is_pivot)
    basis = np.zeros((free.size, ncols), dtype=np.uint8)
    basis[np.arange(free.size), free] = 1
    if piv:
        basis[:, piv] = reduced[:, free].T
    return basis


def solve(m, b) -> np.ndarray | None:
    """Return some ``x`` with ``m x = b`` over GF(2), or ``None`` if inconsistent."""
    m = as_bitmatrix(m)
    b = np.asarray(b, dtype=np.uint8).ravel() & 1
    if b.size != m.nrows:
        raise DimensionError(f"rhs has length {b.size}, matrix has {m.nrows} rows")
    ncols = m.ncols
    aug = np.concatenate([m.to_dense(), b[:, None]], axis=1)
    a, piv = _eliminate(pack_rows(aug), ncols + 1, limit=ncols)
    dense = unpack_rows(a, ncols + 1)
    if dense[len(piv) :, ncols].any():
        return None
    x = np.zeros(ncols, dtype=np.uint8)
    for i, c in enumerate(piv):
        x[c] = dense[i, ncols]
    return x


def in_rowspace(m, v) -> bool:
    """True iff ``v`` is a GF(2) combination of the rows of ``m``."""
    m = as_bitmatrix(m)
    v = np.asarray(v, dtype=np.uint8).ravel() & 1
    if v.size != m.ncols:
        raise DimensionError(f"vector has length {v.size}, matrix has {m.ncols} columns")
    if not v.any():
        return True
    if m.nrows == 0:
        return False
    stacked = np.vstack([m.words, pack_rows(v[None, :])])
    return len(_eliminate(stacked, m.ncols, full=False)[1]) == rank(m)


def independent_rows(m) -> list[int]:
    """Indices of a greedy maximal independent subset of rows, in input order."""
    m = as_bitmatrix(m)
    if m.nrows == 0:
        return []
    # Eliminating the transpose picks pivot columns = earliest independent rows.
    t = as_bitmatrix(m.to_dense().T)
    return _eliminate(t.words, t.ncols, full=False)[1]


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Dense GF(2) matrix product."""
    a = np.asarray(a, dtype=np.uint8)
    b = np.asarray(b, dtype=np.uint8)
    # float64 BLAS is exact here: entries are counts far below 2**53.
    prod = a.astype(np.float64) @ b.astype(np.float64)
    return (prod.astype(np.int64) & 1).astype(np.uint8)
