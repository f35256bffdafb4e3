"""Deterministic random streams.

All sampling in this package draws from Philox, a named 64-bit counter-based
generator, keyed by a 64-bit user seed plus a label path.  Substreams such as
``stream(seed, "edge", 17)`` are independent of the draw order elsewhere, which
keeps per-edge randomness reproducible under any evaluation schedule.
"""

import hashlib

import numpy as np


def stream_key(seed, *labels):
    """128-bit Philox key derived from the seed and a label path."""
    h = hashlib.blake2b(digest_size=16)
    h.update(int(seed).to_bytes(8, "little", signed=False))
    for label in labels:
        h.update(repr(label).encode("utf-8"))
        h.update(b"\x00")
    digest = h.digest()
    return [
        int.from_bytes(digest[:8], "little"),
        int.from_bytes(digest[8:], "little"),
    ]


def stream(seed, *labels):
    """A numpy Generator on its own Philox stream for (seed, labels)."""
    return np.random.Generator(np.random.Philox(key=stream_key(seed, *labels)))
