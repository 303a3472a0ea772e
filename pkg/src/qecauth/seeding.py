"""Deterministic seed splitting.

All randomness flows from one user-supplied 64-bit seed.  A consumer is
addressed by (seed, tag, shard): the tag is CRC32-hashed and used with the
shard index as the SeedSequence spawn key, a counter-based scheme, so
shard-parallel runs reproduce single-threaded runs exactly and report
bytes depend only on (seed, shard count).
"""

from __future__ import annotations

import zlib

import numpy as np


def rng_for(seed: int, tag: str, shard: int = 0) -> np.random.Generator:
    key = zlib.crc32(tag.encode("utf-8"))
    ss = np.random.SeedSequence(entropy=int(seed) & 0xFFFFFFFFFFFFFFFF, spawn_key=(key, shard))
    return np.random.default_rng(ss)


def shard_sizes(total: int, shards: int) -> list[int]:
    if shards < 1:
        raise ValueError("shards must be >= 1")
    base, rem = divmod(total, shards)
    return [base + (1 if i < rem else 0) for i in range(shards)]
