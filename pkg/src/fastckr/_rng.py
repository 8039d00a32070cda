"""Deterministic random substreams.

Every randomized step draws from ``substream(seed, label, *indices)``: a
numpy generator seeded by the master seed together with the CRC-32 of a
module label and any integer indices (scale, iteration, attempt).  The
same labels always give the same stream, independent of call order.
"""
from __future__ import annotations

import zlib

import numpy as np


def substream(seed: int, label: str, *indices: int) -> np.random.Generator:
    key = (zlib.crc32(label.encode()),) + tuple(int(i) for i in indices)
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=key))


def master_seed(rng) -> int:
    """An integer seed: ``rng`` itself if it is one, else drawn from it."""
    if isinstance(rng, (int, np.integer)) and not isinstance(rng, bool):
        return int(rng)
    return int(np.random.default_rng(rng).integers(0, 2**63 - 1))
