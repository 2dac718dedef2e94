"""Deterministic stream derivation for Monte Carlo replication.

A single 64-bit master seed spawns independent counter-based streams keyed
by a SHA-256 hash of (master, *stream indices).  The derived stream is a
pure function of its key, so results never depend on iteration order or on
the degree of parallelism.
"""

from __future__ import annotations

import hashlib
import struct

import numpy as np


def derive_key(master_seed: int, *stream: int) -> tuple[int, int]:
    """Two 64-bit words derived from the master seed and stream indices."""
    payload = struct.pack(f"<{1 + len(stream)}q", master_seed, *stream)
    digest = hashlib.sha256(payload).digest()
    return struct.unpack("<QQ", digest[:16])


def make_rng(master_seed: int, *stream: int) -> np.random.Generator:
    """Philox generator for the given (seed, stream...) key."""
    return np.random.Generator(np.random.Philox(key=derive_key(master_seed, *stream)))
