"""Deterministic seed derivation for parallel Monte Carlo.

Every random quantity in an experiment is generated from a stream keyed by
(master_seed, *path), where path is a tuple of integers identifying the unit
of work (grid index, replicate, trial block, ...). Streams are independent
of worker count and scheduling order, so reruns reproduce results exactly
under any parallel layout.
"""

import hashlib

import numpy as np

# 64-bit streams are derived by hashing; 128-bit Philox keys would also work
# but a single u64 keyed into the bit generator is enough entropy here.
_MASK64 = (1 << 64) - 1


def derive_key(master_seed: int, *path: int) -> int:
    """Collapse (master_seed, *path) into a stable 64-bit stream key."""
    h = hashlib.blake2b(digest_size=8)
    h.update(int(master_seed & _MASK64).to_bytes(8, "little"))
    for part in path:
        h.update(int(part & _MASK64).to_bytes(8, "little"))
    return int.from_bytes(h.digest(), "little")


def rng_for(master_seed: int, *path: int) -> np.random.Generator:
    """Counter-style generator for one unit of work.

    Uses Philox keyed by the derived stream key: fixed-size state, cheap to
    spawn per trial block, and identical regardless of how blocks are
    distributed over workers.
    """
    return np.random.Generator(np.random.Philox(key=derive_key(master_seed, *path)))
