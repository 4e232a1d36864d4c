"""Named, reproducible random substreams derived from one root seed."""

import zlib

import numpy as np


def _tag(purpose: str) -> int:
    return zlib.crc32(purpose.encode("utf-8"))


def substream(root_seed: int, purpose: str, *ids: int) -> np.random.Generator:
    """Return a generator keyed on ``(root_seed, purpose, *ids)``.

    Two calls with the same key always produce the same stream, independent of
    call order, which is what lets baseline and dynamic runs share geometry,
    shadowing and fading draws.
    """
    key = (_tag(purpose),) + tuple(int(i) for i in ids)
    return np.random.default_rng(np.random.SeedSequence(entropy=int(root_seed), spawn_key=key))
