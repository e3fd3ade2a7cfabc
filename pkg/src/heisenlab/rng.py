"""Named, reproducible random streams derived from one integer seed.

Each stream is keyed by a dotted name such as ``"lipschitz.scan"``.  Adding a
new consumer never shifts the numbers drawn by existing ones.
"""

import hashlib

import numpy as np


def stream_key(name: str) -> int:
    return int.from_bytes(hashlib.sha256(name.encode("utf-8")).digest()[:8], "little")


def stream(seed: int, name: str, worker: int = 0) -> np.random.Generator:
    """Generator for ``name`` under ``seed``; ``worker`` selects a shard."""
    return np.random.default_rng(np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, stream_key(name), int(worker)]))
