"""Counter-style seed derivation.

Every random stream is keyed by ``(base_seed, tag, index...)`` so results do
not depend on how work is split across processes.
"""

from __future__ import annotations

import zlib

import numpy as np


def _key(part) -> int:
    if isinstance(part, str):
        return zlib.crc32(part.encode())
    return int(part)


def derive_rng(base_seed, *keys) -> np.random.Generator:
    """Independent generator for the stream ``(base_seed, *keys)``."""
    if isinstance(base_seed, (tuple, list)):
        entropy = [_key(p) for p in base_seed]
    else:
        entropy = _key(base_seed)
    ss = np.random.SeedSequence(entropy, spawn_key=tuple(_key(k) for k in keys))
    return np.random.Generator(np.random.PCG64(ss))
