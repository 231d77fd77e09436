"""Bit-packed linear algebra over F2.

Rows are packed little-endian into ``uint64`` words: column ``c`` lives in
word ``c >> 6`` at bit ``c & 63``.  Every routine that mutates works on a
copy unless its name says otherwise.
"""

from __future__ import annotations

import numpy as np

from ._backend import get_backend, njit

WORD = 64


def n_words(ncols: int) -> int:
    return max(1, (ncols + WORD - 1) // WORD)


def pack(dense) -> np.ndarray:
    """Pack a 0/1 matrix of shape (rows, cols) into uint64 words."""
    a = np.asarray(dense, dtype=np.uint8) & 1
    if a.ndim == 1:
        a = a[None, :]
    rows, cols = a.shape
    words = n_words(cols)
    padded = np.zeros((rows, words * WORD), dtype=np.uint8)
    padded[:, :cols] = a
    by = np.packbits(padded, axis=1, bitorder="little")
    return by.view("<u8").astype(np.uint64, copy=False).reshape(rows, words).copy()


def unpack(packed: np.ndarray, ncols: int) -> np.ndarray:
    p = np.ascontiguousarray(packed, dtype=np.uint64)
    if p.ndim == 1:
        p = p[None, :]
    by = p.astype("<u8").view(np.uint8).reshape(p.shape[0], -1)
    bits = np.unpackbits(by, axis=1, bitorder="little")
    return bits[:, :ncols].copy()


def zeros(rows: int, ncols: int) -> np.ndarray:
    return np.zeros((rows, n_words(ncols)), dtype=np.uint64)


def set_bit(packed: np.ndarray, row: int, col: int) -> None:
    packed[row, col >> 6] ^= np.uint64(1) << np.uint64(col & 63)


# --------------------------------------------------------------------------
# kernels


@njit(cache=True)
def _rref_numba(m, max_col):
    rows, words = m.shape
    pivots = np.empty(min(rows, max_col), dtype=np.int64)
    r = 0
    one = np.uint64(1)
    for c in range(max_col):
        if r == rows:
            break
        w = c >> 6
        b = one << np.uint64(c & 63)
        p = -1
        for i in range(r, rows):
            if m[i, w] & b:
                p = i
                break
        if p < 0:
            continue
        if p != r:
            for k in range(words):
                tmp = m[p, k]
                m[p, k] = m[r, k]
                m[r, k] = tmp
        for i in range(rows):
            if i != r and (m[i, w] & b):
                for k in range(w, words):
                    m[i, k] ^= m[r, k]
        pivots[r] = c
        r += 1
    return r, pivots


def _rref_numpy(m, max_col):
    rows = m.shape[0]
    pivots = []
    r = 0
    for c in range(max_col):
        if r == rows:
            break
        w = c >> 6
        sh = np.uint64(c & 63)
        col = (m[r:, w] >> sh) & np.uint64(1)
        nz = np.flatnonzero(col)
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            m[[r, p]] = m[[p, r]]
        hit = ((m[:, w] >> sh) & np.uint64(1)).astype(bool)
        hit[r] = False
        if hit.any():
            m[hit, w:] ^= m[r, w:]
        pivots.append(c)
        r += 1
    return r, np.asarray(pivots, dtype=np.int64)


@njit(cache=True)
def _insert_numba(m, ncols, flags):
    """Insert rows one by one into an echelon basis keyed by lowest set bit.

    ``flags[i]`` becomes True when row ``i`` was independent of rows before it.
    """
    rows, words = m.shape
    piv = np.full(ncols, -1, dtype=np.int64)
    cap = min(rows, ncols)
    basis = np.zeros((max(cap, 1), words), dtype=np.uint64)
    nb = 0
    row = np.empty(words, dtype=np.uint64)
    one = np.uint64(1)
    for i in range(rows):
        flags[i] = False
        if nb == cap:
            continue
        for k in range(words):
            row[k] = m[i, k]
        w = 0
        while True:
            while w < words and row[w] == 0:
                w += 1
            if w == words:
                break
            x = row[w]
            t = 0
            while ((x >> np.uint64(t)) & one) == 0:
                t += 1
            c = w * 64 + t
            p = piv[c]
            if p < 0:
                for k in range(words):
                    basis[nb, k] = row[k]
                piv[c] = nb
                nb += 1
                flags[i] = True
                break
            for k in range(w, words):
                row[k] ^= basis[p, k]
    return nb


def _insert_numpy(m, ncols, flags):
    basis: dict[int, np.ndarray] = {}
    for i in range(m.shape[0]):
        row = m[i].copy()
        flags[i] = False
        while True:
            nzw = np.flatnonzero(row)
            if nzw.size == 0:
                break
            w = int(nzw[0])
            x = int(row[w])
            c = w * 64 + ((x & -x).bit_length() - 1)
            if c not in basis:
                basis[c] = row
                flags[i] = True
                break
            row[w:] ^= basis[c][w:]
    return len(basis)


def _dispatch_rref(m, max_col):
    if get_backend() == "numba":
        return _rref_numba(m, max_col)
    return _rref_numpy(m, max_col)


# --------------------------------------------------------------------------
# public API


def rref(packed: np.ndarray, ncols: int, max_col: int | None = None):
    """Reduced row echelon form.

    Pivots are searched only in columns ``< max_col`` (default: all), but row
    operations act on the full width, so augmented blocks ride along.
    Returns ``(reduced, pivot_columns)``; the first ``len(pivot_columns)``
    rows of ``reduced`` are the pivot rows.
    """
    m = np.array(packed, dtype=np.uint64, copy=True, order="C")
    if m.ndim == 1:
        m = m[None, :]
    limit = ncols if max_col is None else max_col
    if m.shape[0] == 0 or limit == 0:
        return m, np.zeros(0, dtype=np.int64)
    r, piv = _dispatch_rref(m, limit)
    return m, np.asarray(piv[:r], dtype=np.int64)


def independent_rows(packed: np.ndarray, ncols: int) -> np.ndarray:
    """Boolean mask: row i is independent of rows 0..i-1."""
    m = np.ascontiguousarray(packed, dtype=np.uint64)
    if m.ndim == 1:
        m = m[None, :]
    flags = np.zeros(m.shape[0], dtype=np.bool_)
    if m.shape[0] == 0 or ncols == 0:
        return flags
    if get_backend() == "numba":
        _insert_numba(m, ncols, flags)
    else:
        _insert_numpy(m, ncols, flags)
    return flags


def rank(packed: np.ndarray, ncols: int) -> int:
    m = np.asarray(packed, dtype=np.uint64)
    if m.ndim == 1:
        m = m[None, :]
    if m.shape[0] == 0 or ncols == 0:
        return 0
    if get_backend() == "numba":
        flags = np.zeros(m.shape[0], dtype=np.bool_)
        return int(_insert_numba(np.ascontiguousarray(m), ncols, flags))
    _, piv = rref(m, ncols)
    return len(piv)


def rank_dense(dense) -> int:
    a = np.asarray(dense, dtype=np.uint8)
    if a.ndim != 2 or a.size == 0:
        return 0
    return rank(pack(a), a.shape[1])


def left_kernel(dense) -> np.ndarray:
    """Basis (as rows) of ``{x : x @ A = 0 mod 2}`` for a dense 0/1 matrix ``A``."""
    a = np.asarray(dense, dtype=np.uint8) & 1
    rows, cols = a.shape
    if rows == 0:
        return np.zeros((0, 0), dtype=np.uint8)
    aug = np.concatenate([a, np.eye(rows, dtype=np.uint8)], axis=1)
    red, piv = rref(pack(aug), cols + rows, max_col=cols)
    full = unpack(red, cols + rows)
    return full[len(piv):, cols:].copy()


def row_space(dense) -> np.ndarray:
    """Reduced echelon basis of the row space, as dense rows."""
    a = np.asarray(dense, dtype=np.uint8) & 1
    if a.shape[0] == 0:
        return a.copy()
    red, piv = rref(pack(a), a.shape[1])
    return unpack(red[: len(piv)], a.shape[1])


def extend_basis(span_rows, candidates) -> list[int]:
    """Indices of ``candidates`` that extend the span of ``span_rows``.

    Candidates are scanned in order; one is kept when it is independent of
    the span plus the candidates already kept.
    """
    cand = np.asarray(candidates, dtype=np.uint8)
    if cand.ndim != 2 or cand.shape[0] == 0:
        return []
    span = np.asarray(span_rows, dtype=np.uint8).reshape(-1, cand.shape[1])
    stacked = np.concatenate([span, cand], axis=0)
    flags = independent_rows(pack(stacked), cand.shape[1])
    return [int(i) for i in np.flatnonzero(flags[span.shape[0]:])]


def in_span(vec, rows) -> bool:
    rows = np.asarray(rows, dtype=np.uint8)
    v = np.asarray(vec, dtype=np.uint8).reshape(1, -1)
    if rows.size == 0:
        return not v.any()
    return rank_dense(np.concatenate([rows, v])) == rank_dense(rows)
