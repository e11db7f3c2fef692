"""
Named, counter-based random streams.

All randomness in the package flows through `stream`, which derives an
independent Philox generator from a user seed plus a path of purpose
labels (e.g. ``stream(seed, "lhs", axis)``).  There is no global generator
state, so results do not depend on call order across components or on the
number of worker threads.
"""

from __future__ import annotations

import hashlib

import numpy as np

__all__ = ["stream", "derive_seed"]


def _token(part) -> int:
    if isinstance(part, (int, np.integer)):
        if part < 0:
            raise ValueError("stream path integers must be nonnegative")
        return int(part)
    if isinstance(part, str):
        digest = hashlib.sha256(part.encode("utf-8")).digest()
        return int.from_bytes(digest[:8], "little")
    raise TypeError(f"stream path parts must be int or str, got {type(part)!r}")


def stream(seed: int, *path) -> np.random.Generator:
    """Independent generator for the stream named by ``path`` under ``seed``."""
    entropy = (int(seed) & (2**64 - 1),) + tuple(_token(p) for p in path)
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def derive_seed(seed: int, *path) -> int:
    """Stable 64-bit sub-seed for the stream named by ``path``."""
    entropy = (int(seed) & (2**64 - 1),) + tuple(_token(p) for p in path)
    return int(np.random.SeedSequence(entropy).generate_state(1, np.uint64)[0])
