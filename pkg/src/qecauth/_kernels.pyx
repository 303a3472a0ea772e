# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled twins of the kernels in ``_kernels_py``.

Given identical inputs these must return arrays identical to the pure
backend; the equivalence is enforced by tests/test_kernels.py.
"""

import numpy as np

from libc.stdint cimport int64_t, uint8_t, uint64_t

cdef extern from *:
    """
    #if defined(__GNUC__) || defined(__clang__)
    #define qa_popcountll(x) __builtin_popcountll(x)
    #define qa_ctzll(x) __builtin_ctzll(x)
    #else
    static int qa_popcountll(unsigned long long x) {
        int c = 0; while (x) { x &= x - 1; c++; } return c;
    }
    static int qa_ctzll(unsigned long long x) {
        int c = 0; while (!(x & 1ULL)) { x >>= 1; c++; } return c;
    }
    #endif
    """
    int qa_popcountll(unsigned long long x) nogil
    int qa_ctzll(unsigned long long x) nogil

BACKEND = "cython"

cdef uint64_t _EVEN = 0x5555555555555555ULL


def gray_weight_counts_u64(object basis_obj, int n, object init=0):
    """Weight distribution of {init + span(basis)} for block length n <= 64."""
    if n > 64:
        raise ValueError("u64 kernel limited to n <= 64")
    cdef uint64_t[::1] basis = np.ascontiguousarray(basis_obj, dtype=np.uint64)
    cdef int k = basis.shape[0]
    counts_arr = np.zeros(n + 1, dtype=np.int64)
    cdef int64_t[::1] counts = counts_arr
    cdef uint64_t cw = <uint64_t> int(init)
    cdef uint64_t t, gray, prev = 0, total = (<uint64_t> 1) << k
    cdef int idx
    with nogil:
        counts[qa_popcountll(cw)] += 1
        t = 1
        while t < total:
            gray = t ^ (t >> 1)
            idx = qa_ctzll(gray ^ prev)
            cw ^= basis[idx]
            prev = gray
            counts[qa_popcountll(cw)] += 1
            t += 1
    return counts_arr


def parity_matvec_u64(object rows_obj, object vecs_obj):
    """out[b, r] = parity(rows[r] & vecs[b]) over packed uint64 words."""
    cdef uint64_t[:, ::1] rows = np.ascontiguousarray(rows_obj, dtype=np.uint64)
    cdef uint64_t[:, ::1] vecs = np.ascontiguousarray(vecs_obj, dtype=np.uint64)
    cdef Py_ssize_t R = rows.shape[0], W = rows.shape[1], B = vecs.shape[0]
    if vecs.shape[1] != W:
        raise ValueError("word-count mismatch")
    out_arr = np.empty((B, R), dtype=np.uint8)
    cdef uint8_t[:, ::1] out = out_arr
    cdef Py_ssize_t b, r, w
    cdef uint64_t acc
    with nogil:
        for b in range(B):
            for r in range(R):
                acc = 0
                for w in range(W):
                    acc ^= rows[r, w] & vecs[b, w]
                out[b, r] = <uint8_t> (qa_popcountll(acc) & 1)
    return out_arr


# ---------------------------------------------------------------------------
# Uniform symplectic sampling (directsum pair convention)
# ---------------------------------------------------------------------------

cdef inline uint64_t _swap_pairs(uint64_t a) nogil:
    return ((a & _EVEN) << 1) | ((a >> 1) & _EVEN)

cdef inline int _sip_ds(uint64_t a, uint64_t b) nogil:
    return qa_popcountll(_swap_pairs(a) & b) & 1

cdef inline uint64_t _transvect(uint64_t h, uint64_t v) nogil:
    if _sip_ds(h, v):
        return v ^ h
    return v

cdef void _find_transvection(uint64_t x, uint64_t y, int nn,
                             uint64_t* h0, uint64_t* h1) nogil:
    cdef int i, ii
    cdef uint64_t xx, yy, z
    h0[0] = 0
    h1[0] = 0
    if x == y:
        return
    if _sip_ds(x, y):
        h0[0] = x ^ y
        return
    for i in range(nn // 2):
        ii = 2 * i
        xx = (x >> ii) & 3
        yy = (y >> ii) & 3
        if xx and yy:
            z = xx ^ yy
            if z == 0:
                z = 2 if xx == 3 else 3
            z = z << ii
            h0[0] = x ^ z
            h1[0] = y ^ z
            return
    z = 0
    for i in range(nn // 2):
        ii = 2 * i
        xx = (x >> ii) & 3
        yy = (y >> ii) & 3
        if xx and not yy:
            z |= (<uint64_t> (2 if xx == 3 else (2 if xx == 1 else 1))) << ii
            break
    for i in range(nn // 2):
        ii = 2 * i
        xx = (x >> ii) & 3
        yy = (y >> ii) & 3
        if yy and not xx:
            z |= (<uint64_t> (2 if yy == 3 else (2 if yy == 1 else 1))) << ii
            break
    h0[0] = x ^ z
    h1[0] = y ^ z


def symplectic_batch_ds(int n, object ks_obj, object bits_obj):
    """Batch Koenig–Smolin sampling; see _kernels_py.symplectic_batch_ds."""
    cdef int64_t[:, ::1] ks = np.ascontiguousarray(ks_obj, dtype=np.int64)
    cdef uint8_t[:, ::1] bits = np.ascontiguousarray(bits_obj, dtype=np.uint8)
    cdef Py_ssize_t B = ks.shape[0]
    cdef int nn_max = 2 * n
    if n < 1 or n > 16:
        raise ValueError("n out of range")
    out_arr = np.zeros((B, nn_max, nn_max), dtype=np.uint8)
    cdef uint8_t[:, :, ::1] out = out_arr
    cdef uint64_t[32] g
    cdef uint64_t f1, e1, t0, t1, h0, eprime, v
    cdef Py_ssize_t idx
    cdef int j, nn, r, c, off, bi
    with nogil:
        for idx in range(B):
            g[0] = 1
            g[1] = 2
            off = 0
            for j in range(1, n + 1):
                nn = 2 * j
                if j > 1:
                    for r in range(nn - 2 - 1, -1, -1):
                        g[r + 2] = g[r] << 2
                    g[0] = 1
                    g[1] = 2
                f1 = <uint64_t> ks[idx, j - 1]
                e1 = 1
                _find_transvection(e1, f1, nn, &t0, &t1)
                eprime = e1
                for bi in range(2, nn):
                    if bits[idx, off + bi - 1]:
                        eprime |= (<uint64_t> 1) << bi
                h0 = _transvect(t0, eprime)
                h0 = _transvect(t1, h0)
                if bits[idx, off]:
                    f1 = 0
                off += nn - 1
                for r in range(nn):
                    v = g[r]
                    v = _transvect(t0, v)
                    v = _transvect(t1, v)
                    v = _transvect(h0, v)
                    v = _transvect(f1, v)
                    g[r] = v
            for r in range(nn_max):
                v = g[r]
                for c in range(nn_max):
                    out[idx, r, c] = <uint8_t> ((v >> c) & 1)
    return out_arr
