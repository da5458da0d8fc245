"""Deterministic random streams with explicit purpose tags.

Every stochastic ingredient of an experiment (input locations, corruption
mask, noise magnitudes, weight init, minibatch order, ...) draws from its
own counter-based stream, keyed by (seed, tag).  Streams are therefore
independent of each other and of how much randomness any other ingredient
consumed, which is what makes paired comparisons across configurations
possible: changing the noise scale never shifts the corruption mask.

Philox is a stateless 64-bit counter-based generator, so a (seed, tag) key
fully determines the stream on any platform.
"""

from __future__ import annotations

import hashlib

import numpy as np


def stream(seed: int, tag: str) -> np.random.Generator:
    """Return the generator for the given (seed, tag) pair.

    The tag is hashed into the second Philox key word, the seed fills the
    first; distinct tags give unrelated streams under the same seed.
    """
    if not isinstance(seed, (int, np.integer)):
        raise TypeError(f"seed must be an integer, got {type(seed).__name__}")
    if seed < 0:
        raise ValueError(f"seed must be nonnegative, got {seed}")
    digest = hashlib.blake2b(tag.encode("utf-8"), digest_size=8).digest()
    key = np.array(
        [np.uint64(int(seed) & 0xFFFFFFFFFFFFFFFF),
         np.uint64(int.from_bytes(digest, "little"))],
        dtype=np.uint64,
    )
    return np.random.Generator(np.random.Philox(key=key))
