"""Pure numpy/Python implementations of the hot kernels.

These are the fallback for the compiled extension ``qecauth._kernels``.
Both backends must be exact functional twins: given identical inputs
(including pre-drawn randomness) they return identical arrays, so reports
are bit-identical regardless of which backend is active.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"

_CHUNK = 1 << 18


def gray_weight_counts_u64(basis: np.ndarray, n: int, init: int = 0) -> np.ndarray:
    """Weight distribution of {init + span(basis)} for block length n <= 64.

    Enumerates all 2^k combinations of the k basis word-masks.
    """
    basis = np.asarray(basis, dtype=np.uint64)
    k = basis.shape[0]
    if n > 64:
        raise ValueError("u64 kernel limited to n <= 64")
    counts = np.zeros(n + 1, dtype=np.int64)
    total = 1 << k
    init_w = np.uint64(init)
    for start in range(0, total, _CHUNK):
        stop = min(start + _CHUNK, total)
        idx = np.arange(start, stop, dtype=np.uint64)
        acc = np.full(stop - start, init_w, dtype=np.uint64)
        for j in range(k):
            sel = ((idx >> np.uint64(j)) & np.uint64(1)).astype(bool)
            acc[sel] ^= basis[j]
        w = np.bitwise_count(acc).astype(np.int64)
        counts += np.bincount(w, minlength=n + 1)[: n + 1]
    return counts


def parity_matvec_u64(rows: np.ndarray, vecs: np.ndarray) -> np.ndarray:
    """GF(2) mat-vec batch on packed uint64 words.

    rows: (R, W) packed matrix rows; vecs: (B, W) packed vectors.
    Returns (B, R) uint8 with out[b, r] = parity(rows[r] & vecs[b]).
    """
    rows = np.asarray(rows, dtype=np.uint64)
    vecs = np.asarray(vecs, dtype=np.uint64)
    B = vecs.shape[0]
    R = rows.shape[0]
    out = np.empty((B, R), dtype=np.uint8)
    step = max(1, _CHUNK // max(1, R))
    for start in range(0, B, step):
        stop = min(start + step, B)
        t = vecs[start:stop, None, :] & rows[None, :, :]
        out[start:stop] = (
            np.bitwise_count(t).sum(axis=2, dtype=np.uint64) & np.uint64(1)
        ).astype(np.uint8)
    return out


# ---------------------------------------------------------------------------
# Uniform symplectic-group sampling (directsum pair convention, masks as ints)
# ---------------------------------------------------------------------------

_EVEN = 0x5555555555555555  # bits at even positions


def _swap_pairs(a: int) -> int:
    return ((a & _EVEN) << 1) | ((a >> 1) & _EVEN)


def _sip_ds(a: int, b: int) -> int:
    return (_swap_pairs(a) & b).bit_count() & 1


def _transvect(h: int, v: int) -> int:
    return v ^ h if _sip_ds(h, v) else v


def _find_transvection_ds(x: int, y: int, nn: int) -> tuple[int, int]:
    """Masks (h0, h1) with Z_h0 Z_h1 x = y, both vectors nonzero."""
    if x == y:
        return 0, 0
    if _sip_ds(x, y):
        return x ^ y, 0
    # a pair position where both are nonzero
    for i in range(nn // 2):
        ii = 2 * i
        xx = (x >> ii) & 3
        yy = (y >> ii) & 3
        if xx and yy:
            z = xx ^ yy
            if z == 0:  # same pair content; pick an anticommuting pair value
                z = 2 if xx == 3 else 3
            z <<= ii
            return x ^ z, y ^ z
    # no common pair: route through an intermediate via two pair positions
    z = 0
    for i in range(nn // 2):
        ii = 2 * i
        xx = (x >> ii) & 3
        yy = (y >> ii) & 3
        if xx and not yy:
            z |= (2 if xx == 3 else (2 if xx == 1 else 1)) << ii
            break
    for i in range(nn // 2):
        ii = 2 * i
        xx = (x >> ii) & 3
        yy = (y >> ii) & 3
        if yy and not xx:
            z |= (2 if yy == 3 else (2 if yy == 1 else 1)) << ii
            break
    return x ^ z, y ^ z


def _symplectic_rows_ds(n: int, ks_row, bits_row) -> list[int]:
    """One Koenig–Smolin sample in the directsum convention, rows as masks."""
    g = [1, 2]
    off = 0
    # level-1 randomness occupies ks_row[0] / bits_row[0:1]
    for j in range(1, n + 1):
        nn = 2 * j
        if j > 1:
            g = [1, 2] + [m << 2 for m in g]
        k = int(ks_row[j - 1])
        f1 = k
        e1 = 1
        t0, t1 = _find_transvection_ds(e1, f1, nn)
        b = bits_row[off : off + nn - 1]
        off += nn - 1
        eprime = e1
        for idx in range(2, nn):
            if b[idx - 1]:
                eprime |= 1 << idx
        h0 = _transvect(t0, eprime)
        h0 = _transvect(t1, h0)
        if b[0]:
            f1 = 0
        for r in range(nn):
            v = g[r]
            v = _transvect(t0, v)
            v = _transvect(t1, v)
            v = _transvect(h0, v)
            v = _transvect(f1, v)
            g[r] = v
    return g


def symplectic_batch_ds(n: int, ks: np.ndarray, bits: np.ndarray) -> np.ndarray:
    """Batch of uniform symplectic matrices, directsum convention.

    ks: (B, n) int64 with ks[:, j-1] uniform in [1, 4^j - 1];
    bits: (B, n*n) uint8 fair coin flips (level j consumes 2j-1 of them).
    Returns (B, 2n, 2n) uint8 with [b, r, c] = bit c of row r.
    """
    ks = np.asarray(ks, dtype=np.int64)
    bits = np.asarray(bits, dtype=np.uint8)
    B = ks.shape[0]
    nn = 2 * n
    out = np.zeros((B, nn, nn), dtype=np.uint8)
    for idx in range(B):
        rows = _symplectic_rows_ds(n, ks[idx], bits[idx])
        for r in range(nn):
            m = rows[r]
            for c in range(nn):
                out[idx, r, c] = (m >> c) & 1
    return out
