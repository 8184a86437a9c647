"""Seeded random streams.

Every random decision in the package draws from a generator derived from
one 64-bit user seed plus a stream name, so the partitioner, the orderer
and the analytics can be re-seeded independently.
"""

from __future__ import annotations

import hashlib

import numpy as np

MASK64 = (1 << 64) - 1


def _name_key(name: str) -> int:
    return int.from_bytes(hashlib.sha256(name.encode()).digest()[:8], "little")


def substream(seed: int, name: str, *extra: int) -> np.random.Generator:
    """Generator for the named substream of ``seed``.

    ``extra`` integers (part index, iteration, ...) select further
    independent children of the same stream.
    """
    entropy = [int(seed) & MASK64, _name_key(name)] + [int(e) & MASK64 for e in extra]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


def splitmix64(x: np.ndarray) -> np.ndarray:
    """Vectorised splitmix64 finaliser over uint64 values."""
    z = np.asarray(x, dtype=np.uint64).copy()
    with np.errstate(over="ignore"):
        z += np.uint64(0x9E3779B97F4A7C15)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        z = z ^ (z >> np.uint64(31))
    return z


def keyed_colors(keys: np.ndarray, k: int, seed: int, iteration: int) -> np.ndarray:
    """Colour in ``[0, k)`` for each vertex key, a pure function of (seed, iteration, key).

    Colours depend only on the key, never on which task owns the vertex or
    what id it currently carries, which keeps colour-coding estimates
    identical across layouts.
    """
    salt = splitmix64(np.array([(int(seed) & MASK64) ^ _name_key("color")], dtype=np.uint64))[0]
    salt = splitmix64(np.array([salt ^ np.uint64(iteration & MASK64)], dtype=np.uint64))[0]
    h = splitmix64(np.asarray(keys, dtype=np.uint64) ^ salt)
    return (h % np.uint64(k)).astype(np.int64)
