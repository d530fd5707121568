"""Deterministic random-stream derivation.

Every random draw in the package comes from a generator derived from the run's
root seed and a tuple of string keys, e.g. ``(panel, date, model, "ensemble")``.
Streams therefore do not depend on execution order or on how many threads
process the grid.
"""

import zlib
from collections.abc import Hashable

import numpy as np


def _key_to_int(key: Hashable) -> int:
    return zlib.crc32(str(key).encode("utf-8"))


def derive_seed_sequence(root_seed: int, *keys: Hashable) -> np.random.SeedSequence:
    """Build the seed sequence for a keyed stream.

    Args:
        root_seed: The run's root seed
        *keys: Identifiers of the stream (panel, date, model, purpose, ...)

    Returns:
        A SeedSequence whose spawn key encodes the stream identifiers
    """
    return np.random.SeedSequence(int(root_seed), spawn_key=tuple(_key_to_int(k) for k in keys))


def derive_rng(root_seed: int, *keys: Hashable) -> np.random.Generator:
    """Return an independent generator for the keyed stream."""
    return np.random.default_rng(derive_seed_sequence(root_seed, *keys))
