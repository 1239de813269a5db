"""Deterministic stream derivation on top of the Philox counter-based generator.

Every random quantity in the package draws from a stream keyed by a user
seed plus a tuple of context tags (model name, replication index, ...).
Streams with distinct tags are statistically independent, so datasets,
fits and Monte-Carlo draws can be produced concurrently without sharing
generator state.
"""

from __future__ import annotations

import zlib

import numpy as np

_MASK64 = (1 << 64) - 1


def _tag_word(tag) -> int:
    if isinstance(tag, str):
        return zlib.crc32(tag.encode("utf-8"))
    return int(tag) & _MASK64


def substream(seed: int, *tags) -> np.random.Generator:
    """Return a Generator keyed by ``(seed, *tags)``.

    The same key always yields the same stream; any change in the key
    yields an independent one.
    """
    entropy = [int(seed) & _MASK64] + [_tag_word(t) for t in tags]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def derive_seed(seed: int, *tags) -> int:
    """Collapse ``(seed, *tags)`` into a fresh 63-bit seed value."""
    entropy = [int(seed) & _MASK64] + [_tag_word(t) for t in tags]
    word = np.random.SeedSequence(entropy).generate_state(1, np.uint64)[0]
    return int(word) >> 1
