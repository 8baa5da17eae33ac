"""Deterministic seed splitting.

Every randomized step derives its own seed from the master seed, a string
tag naming the step, and an instance counter, so any stage can be rerun in
isolation and parallel workers never share a stream.
"""
import hashlib

import numpy as np

_MASK = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """One round of the SplitMix64 finalizer on a 64-bit integer."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return x ^ (x >> 31)


def _tag_hash(tag: str) -> int:
    digest = hashlib.blake2b(tag.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def mix(master_seed: int, tag: str, counter: int = 0) -> int:
    """Combine ``(master_seed, tag, counter)`` into a 64-bit sub-seed."""
    h = splitmix64(int(master_seed) & _MASK)
    h = splitmix64(h ^ _tag_hash(tag))
    return splitmix64(h ^ (int(counter) & _MASK))


def rng_for(master_seed: int, tag: str, counter: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(mix(master_seed, tag, counter)))
