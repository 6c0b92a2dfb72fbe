"""Deterministic random-stream derivation.

Every random draw in a run descends from a single 64-bit master seed.
Named substreams are derived by hashing string/integer labels into the
entropy of a ``numpy.random.SeedSequence``, so a stream such as
``substream(seed, "qod", user_id)`` can be recreated at any point without
replaying draws from any other stream. This is what keeps the per-user
data-quality draws identical across recruitment schemes.
"""

from __future__ import annotations

import hashlib

import numpy as np

_U64 = 0xFFFFFFFFFFFFFFFF


def _encode_label(label) -> int:
    """Map a stream label to a stable 64-bit integer."""
    if isinstance(label, (bool, float)):
        raise TypeError(f"stream labels must be int or str, got {type(label).__name__}")
    if isinstance(label, (int, np.integer)):
        return int(label) & _U64
    if isinstance(label, str):
        digest = hashlib.sha256(label.encode("utf-8")).digest()
        return int.from_bytes(digest[:8], "little")
    raise TypeError(f"stream labels must be int or str, got {type(label).__name__}")


def _seed_sequence(seed: int, labels) -> np.random.SeedSequence:
    entropy = [int(seed) & _U64] + [_encode_label(label) for label in labels]
    return np.random.SeedSequence(entropy)


def substream(seed: int, *labels) -> np.random.Generator:
    """Generator for the (seed, labels...) stream, independent of all others."""
    return np.random.default_rng(_seed_sequence(seed, labels))


def child_seed(seed: int, *labels) -> int:
    """A 64-bit seed derived from (seed, labels...), e.g. for replicate runs."""
    state = _seed_sequence(seed, labels).generate_state(2, np.uint32)
    return int(state[0]) | (int(state[1]) << 32)
