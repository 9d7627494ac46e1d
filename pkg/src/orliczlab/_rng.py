"""Named, counter-based random substreams.

Every random draw in the library flows from one root seed.  A substream is
addressed by a path of labels (strings or ints); the path is hashed into a
``SeedSequence`` spawn key feeding a counter-based Philox generator, so
streams are independent, order-free and reproducible regardless of how many
other streams were consumed before them.
"""

from __future__ import annotations

import hashlib

import numpy as np

__all__ = ["substream", "spawn_key"]


def _component(c) -> int:
    if isinstance(c, (int, np.integer)):
        if c < 0:
            raise ValueError("substream path components must be non-negative")
        return int(c)
    digest = hashlib.sha256(str(c).encode("utf8")).digest()
    return int.from_bytes(digest[:8], "little")


def spawn_key(*path) -> tuple[int, ...]:
    """Map a label path to a deterministic SeedSequence spawn key."""
    if not path:
        raise ValueError("substream path must not be empty")
    return tuple(_component(c) for c in path)


def substream(root_seed: int, *path) -> np.random.Generator:
    """Generator for the substream addressed by ``path`` under ``root_seed``."""
    seq = np.random.SeedSequence(root_seed, spawn_key=spawn_key(*path))
    return np.random.Generator(np.random.Philox(seq))
