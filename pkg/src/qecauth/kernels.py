"""Hot-kernel dispatch: compiled extension if available, numpy/Python otherwise.

The two backends are exact functional twins; everything downstream is
bit-identical regardless of which one is active.  ``backend_name()`` reports
the selection, and ``get_backend()`` lets the benchmark load both explicitly.
"""

from __future__ import annotations

import os

import numpy as np

from . import _kernels_py

try:
    from . import _kernels as _ext  # compiled extension, optional
except ImportError:  # pragma: no cover - depends on build environment
    _ext = None

_forced = os.environ.get("QECAUTH_BACKEND")
if _forced == "python":
    _active = _kernels_py
elif _forced == "cython":
    if _ext is None:
        raise ImportError("QECAUTH_BACKEND=cython but the extension is not built")
    _active = _ext
elif _forced:
    raise ImportError(f"unknown QECAUTH_BACKEND {_forced!r}")
else:
    _active = _ext if _ext is not None else _kernels_py


def backend_name() -> str:
    return _active.BACKEND


def available_backends() -> tuple[str, ...]:
    return ("cython", "python") if _ext is not None else ("python",)


def get_backend(name: str):
    if name == "python":
        return _kernels_py
    if name == "cython":
        if _ext is None:
            raise ValueError("compiled kernel extension not built")
        return _ext
    raise ValueError(f"unknown backend {name!r}")


def gray_weight_counts(basis_masks, n: int, init: int = 0, *, backend=None) -> np.ndarray:
    """Weight distribution of the coset ``init + span(basis_masks)``.

    basis_masks are int bitmasks of length-n vectors.  Uses the fast u64
    kernel when the block length fits a machine word, a Python big-int
    Gray-code walk otherwise.
    """
    impl = backend or _active
    k = len(basis_masks)
    if n <= 64:
        basis = np.array([int(m) for m in basis_masks], dtype=np.uint64)
        return impl.gray_weight_counts_u64(basis, n, int(init))
    counts = np.zeros(n + 1, dtype=np.int64)
    cw = int(init)
    counts[cw.bit_count()] += 1
    prev = 0
    for t in range(1, 1 << k):
        gray = t ^ (t >> 1)
        idx = ((gray ^ prev) & -(gray ^ prev)).bit_length() - 1
        cw ^= basis_masks[idx]
        prev = gray
        counts[cw.bit_count()] += 1
    return counts


def parity_matvec(rows_packed: np.ndarray, vecs_packed: np.ndarray, *, backend=None) -> np.ndarray:
    """out[b, r] = parity(rows_packed[r] & vecs_packed[b]) over uint64 words."""
    impl = backend or _active
    return impl.parity_matvec_u64(
        np.ascontiguousarray(rows_packed, dtype=np.uint64),
        np.ascontiguousarray(vecs_packed, dtype=np.uint64),
    )


def _ds_to_std_index(n: int) -> np.ndarray:
    """Coordinate map from directsum pair convention to (x-block | z-block)."""
    sigma = np.empty(2 * n, dtype=np.int64)
    for i in range(n):
        sigma[2 * i] = i
        sigma[2 * i + 1] = n + i
    return sigma


def sample_symplectic_batch(n: int, count: int, rng: np.random.Generator, *, backend=None) -> np.ndarray:
    """Uniform random elements of Sp(2n, F_2), standard (x|z) convention.

    Returns (count, 2n, 2n) uint8 matrices acting on column vectors (x||z).
    Randomness is drawn here from ``rng`` and fed to the backend, so both
    backends produce identical samples for identical generator state.
    """
    if n < 1 or n > 16:
        raise ValueError("symplectic sampling supports 1 <= n <= 16")
    impl = backend or _active
    ks = np.empty((count, n), dtype=np.int64)
    for j in range(1, n + 1):
        ks[:, j - 1] = rng.integers(1, 1 << (2 * j), size=count, dtype=np.int64)
    bits = rng.integers(0, 2, size=(count, n * n), dtype=np.uint8)
    ds = impl.symplectic_batch_ds(n, ks, bits)
    sigma = _ds_to_std_index(n)
    tmp = np.zeros_like(ds)
    tmp[:, sigma[:, None], sigma[None, :]] = ds
    # rows of the raw output are images of basis vectors; transpose to get
    # column-action matrices (v -> M v), matching the recorded transvections
    return np.ascontiguousarray(tmp.transpose(0, 2, 1))


def transvections_for_sample(n: int, ks_row, bits_row) -> list[int]:
    """Transvection masks (standard-convention ints) composing one sample.

    The Koenig–Smolin construction is a product of per-level symplectic
    transvections; recording them yields a circuit-ready decomposition of the
    sampled element.  Order: first mask applied first.
    """
    ordered: list[int] = []
    off = 0
    for j in range(1, n + 1):
        nn = 2 * j
        k = int(ks_row[j - 1])
        f1 = k
        t0, t1 = _kernels_py._find_transvection_ds(1, f1, nn)
        b = bits_row[off : off + nn - 1]
        off += nn - 1
        eprime = 1
        for idx in range(2, nn):
            if b[idx - 1]:
                eprime |= 1 << idx
        h0 = _kernels_py._transvect(t0, eprime)
        h0 = _kernels_py._transvect(t1, h0)
        if b[0]:
            f1 = 0
        # each later level prepends one pair, shifting level-j coordinates up
        lift = 2 * (n - j)
        ordered.extend(m << lift for m in (t0, t1, h0, f1) if m)
    # convert directsum masks to standard (x|z) bit layout
    std: list[int] = []
    for m in ordered:
        s = 0
        for i in range(n):
            if (m >> (2 * i)) & 1:
                s |= 1 << i
            if (m >> (2 * i + 1)) & 1:
                s |= 1 << (n + i)
        std.append(s)
    return std
