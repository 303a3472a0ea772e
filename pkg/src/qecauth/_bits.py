"""Bit-level helpers shared across modules.

Convention used everywhere in this package: bit ``i`` of an integer mask is
qubit/coordinate ``i`` (little-endian), positions are 0-based.
"""

from __future__ import annotations

import numpy as np


def parity(x: int) -> int:
    return x.bit_count() & 1


def mask_of(positions) -> int:
    m = 0
    for p in positions:
        m |= 1 << p
    return m


def bits_of(mask: int, n: int) -> tuple[int, ...]:
    return tuple((mask >> i) & 1 for i in range(n))


def support(mask: int) -> tuple[int, ...]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return tuple(out)


def words_needed(nbits: int) -> int:
    return max(1, (nbits + 63) // 64)


def int_to_words(x: int, nwords: int) -> np.ndarray:
    out = np.zeros(nwords, dtype=np.uint64)
    for w in range(nwords):
        out[w] = (x >> (64 * w)) & 0xFFFFFFFFFFFFFFFF
    return out


def words_to_int(words: np.ndarray) -> int:
    x = 0
    for w in range(len(words)):
        x |= int(words[w]) << (64 * w)
    return x


def pack_bit_rows(bits: np.ndarray, nbits: int) -> np.ndarray:
    """Pack a (B, nbits) uint8 bit array into (B, W) uint64 word masks."""
    if bits.ndim != 2 or bits.shape[1] != nbits:
        raise ValueError("bits must be (B, nbits)")
    nwords = words_needed(nbits)
    padded = np.zeros((bits.shape[0], nwords * 64), dtype=np.uint8)
    padded[:, :nbits] = bits
    packed = np.packbits(padded, axis=1, bitorder="little")
    return packed.view(np.uint64).reshape(bits.shape[0], nwords)


def unpack_bit_rows(words: np.ndarray, nbits: int) -> np.ndarray:
    """Inverse of :func:`pack_bit_rows`."""
    asbytes = np.ascontiguousarray(words).view(np.uint8)
    bits = np.unpackbits(asbytes, axis=1, bitorder="little")
    return bits[:, :nbits].copy()
