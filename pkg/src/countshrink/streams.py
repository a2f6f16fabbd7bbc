"""Reproducible random streams.

Every sampler in this package takes an explicit ``numpy.random.Generator``.
Parallel work (simulation replicates, independent chains) derives its streams
from a single master seed with :func:`spawn_stream`, built on the
counter-based Philox generator, so results are bit-reproducible and
independent of scheduling order.
"""
from __future__ import annotations

import numpy as np


def spawn_stream(master_seed: int, *path: int) -> np.random.Generator:
    """Derive an independent generator from ``(master_seed, *path)``.

    ``path`` is a tuple of small integers identifying the task, e.g.
    ``(replicate_index, method_index)``.  Identical arguments always yield an
    identical stream; distinct paths yield statistically independent streams.
    """
    ss = np.random.SeedSequence(
        entropy=int(master_seed), spawn_key=tuple(int(p) for p in path)
    )
    return np.random.Generator(np.random.Philox(ss))
