"""Counter-based random substreams shared by calibration, permutation and simulation code."""

import hashlib

import numpy as np

StreamKey = int | float | str


def _entropy_word(key: StreamKey) -> int:
    if isinstance(key, bool):
        return int(key)
    if isinstance(key, int) and key >= 0:
        return key
    digest = hashlib.blake2b(repr(key).encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def seed_sequence(*keys: StreamKey) -> np.random.SeedSequence:
    """Builds the SeedSequence identified by an ordered tuple of keys.

    Non-negative integers are used verbatim; floats, strings and negative
    integers are hashed, so the mapping is stable across processes.
    """
    return np.random.SeedSequence([_entropy_word(k) for k in keys])


def substream(*keys: StreamKey) -> np.random.Generator:
    """Returns an independent Generator for the given keys."""
    return np.random.default_rng(seed_sequence(*keys))


def derive_seed(*keys: StreamKey) -> int:
    """Returns a 63-bit integer seed derived from the given keys."""
    return int(seed_sequence(*keys).generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))
