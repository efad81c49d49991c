"""Seeded random streams.

Every random draw in the package comes from a ``numpy.random.Generator``
built on a ``SeedSequence``. Child streams are addressed by a key tuple, so
``stream(seed, 3, 1)`` is the same generator no matter which process asks
for it or in what order. There is no global RNG.
"""
import numpy as np


def stream(seed, *key):
    ss = np.random.SeedSequence(entropy=int(seed) & 0xFFFFFFFFFFFFFFFF,
                                spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


def child_seed(seed, *key):
    """A 64-bit integer seed derived from (seed, key)."""
    ss = np.random.SeedSequence(entropy=int(seed) & 0xFFFFFFFFFFFFFFFF,
                                spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, dtype=np.uint64)[0])
