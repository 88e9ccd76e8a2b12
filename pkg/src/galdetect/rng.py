"""Seeded random substreams.

Every random decision in the pipeline (synthetic data, parameter init,
batch shuffling, dropout) draws from a named substream of one experiment
seed, so changing one stage's randomness never perturbs another stage.
"""

from __future__ import annotations

import zlib

import numpy as np


def substream(seed: int, name: str) -> np.random.Generator:
    """Generator for the substream `name` of `seed`.

    The name is folded in through crc32 so the mapping is stable across
    platforms and Python versions (`hash()` is salted, so it is not).
    """
    key = zlib.crc32(name.encode("utf-8"))
    return np.random.default_rng(np.random.SeedSequence([int(seed), key]))
