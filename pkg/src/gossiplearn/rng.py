"""Deterministic named random sub-streams.

A single master seed fans out into independent generators identified by
string/integer labels.  A stream depends only on (master_seed, labels),
never on creation order, so adding a new stream to a run can not perturb
any existing one.
"""

from __future__ import annotations

import hashlib

import numpy as np


def substream(master_seed: int, *labels) -> np.random.Generator:
    """Return the generator for the sub-stream named by ``labels``.

    The labels are hashed into the SeedSequence spawn key, which keeps
    streams for distinct names statistically independent.
    """
    tag = "/".join(str(part) for part in labels).encode("utf-8")
    digest = hashlib.sha256(tag).digest()
    words = tuple(int.from_bytes(digest[i : i + 4], "little") for i in range(0, 16, 4))
    seq = np.random.SeedSequence(entropy=int(master_seed), spawn_key=words)
    return np.random.default_rng(seq)
