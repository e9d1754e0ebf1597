"""Deterministic RNG substream derivation.

All randomness in the package flows from numpy Generators. A master seed plus a
path of labels (integers or strings) selects a substream via
``numpy.random.SeedSequence(master, spawn_key=...)``. String labels are mapped
to 32-bit integers with CRC-32 of their UTF-8 bytes, so the scheme does not
depend on the process hash seed and is reproducible across runs and platforms.
"""

from __future__ import annotations

import zlib

import numpy as np


def _label_to_int(label: int | str) -> int:
    if isinstance(label, bool):
        raise TypeError("bool is not a valid substream label")
    if isinstance(label, int):
        if label < 0:
            raise ValueError("integer labels must be nonnegative")
        return label
    return zlib.crc32(label.encode("utf-8"))


def substream(master_seed: int, *path: int | str) -> np.random.Generator:
    """Return the Generator for ``path`` under ``master_seed``.

    The same (master_seed, path) always yields the same stream; sibling paths
    are statistically independent.
    """
    key = tuple(_label_to_int(p) for p in path)
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=key))
