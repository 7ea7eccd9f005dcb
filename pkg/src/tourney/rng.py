"""Seeded random streams.

Every random draw in the package comes from a numpy ``Generator`` backed by
PCG64, seeded through a ``SeedSequence`` whose entropy is the master seed and
whose spawn key names the consumer.  Two streams with different names never
share state, and the same (seed, names) pair always yields the same stream on
any platform numpy supports.
"""

import zlib

import numpy as np


def _key(part):
    if isinstance(part, (int, np.integer)):
        return int(part) & 0xFFFFFFFF
    return zlib.crc32(str(part).encode())


def stream(seed, *names):
    """Return a PCG64 generator for ``seed`` and the stream path ``names``."""
    ss = np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=tuple(_key(p) for p in names))
    return np.random.Generator(np.random.PCG64(ss))


def derive(seed, *names):
    """Derive a 63-bit child seed, handy for passing a seed to another component."""
    return int(stream(seed, "derive", *names).integers(0, 2**63 - 1))
