"""Seed derivation for named randomness sub-streams.

Every random choice in the pipeline flows from one top-level seed through
a named sub-stream ("split", "sgd_shuffle", "synth", ...).  Derivation is
SHA-256 over ``"<seed>:<name>"``, so identical (seed, name) pairs yield the
same stream on any machine or Python build.
"""

from __future__ import annotations

import hashlib
import random


def derive_seed(seed: int, stream: str) -> int:
    """Return a 64-bit sub-seed for the given master seed and stream name."""
    digest = hashlib.sha256(f"{seed}:{stream}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def stream_rng(seed: int, stream: str) -> random.Random:
    """A ``random.Random`` seeded from the named sub-stream of ``seed``."""
    return random.Random(derive_seed(seed, stream))
