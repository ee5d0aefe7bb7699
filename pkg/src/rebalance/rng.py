"""Keyed random streams.

Every random decision in the package draws from a stream identified by a
master seed plus a tuple of tags (operation name, member index, pass
number, ...).  Streams are independent of each other, so the result of one
operation never depends on how many draws another one made.
"""

from __future__ import annotations

import hashlib

import numpy as np


def _tag_to_int(tag: int | str) -> int:
    if isinstance(tag, (int, np.integer)):
        if tag < 0:
            raise ValueError(f"negative stream tag: {tag}")
        return int(tag)
    digest = hashlib.blake2b(str(tag).encode("utf-8"), digest_size=4).digest()
    return int.from_bytes(digest, "little")


def _seed_sequence(seed: int, tags: tuple) -> np.random.SeedSequence:
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    return np.random.SeedSequence(int(seed), spawn_key=tuple(_tag_to_int(t) for t in tags))


def stream(seed: int, *tags: int | str) -> np.random.Generator:
    """Return a Philox generator keyed by ``(seed, *tags)``."""
    return np.random.Generator(np.random.Philox(_seed_sequence(seed, tags)))


def derive_seed(seed: int, *tags: int | str) -> int:
    """Derive a 63-bit child seed, e.g. to hand to an API that takes a plain int."""
    state = _seed_sequence(seed, tags).generate_state(1, dtype=np.uint64)[0]
    return int(state >> np.uint64(1))
